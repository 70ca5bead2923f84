"""Cylindrical-grid helpers for ray recursions.

Radial potentials make every quantity built from rays along a fixed unit
vector axisymmetric about that axis, so fields live on an (s, z) grid:
s >= 0 the distance from the axis, z the coordinate along it.  Arrays are
shaped (n_s, n_z).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator


@dataclass(frozen=True)
class CylGrid:
    s: np.ndarray
    z: np.ndarray

    @property
    def ds(self) -> float:
        return float(self.s[1] - self.s[0])

    @property
    def dz(self) -> float:
        return float(self.z[1] - self.z[0])

    def mesh(self):
        return np.meshgrid(self.s, self.z, indexing="ij")

    def radius(self) -> np.ndarray:
        ss, zz = self.mesh()
        return np.sqrt(ss * ss + zz * zz)


def make_grid(s_max: float, z_max: float, n_s: int, n_z: int,
              z_min: float | None = None) -> CylGrid:
    if z_min is None:
        z_min = -z_max
    return CylGrid(s=np.linspace(0.0, s_max, n_s),
                   z=np.linspace(z_min, z_max, n_z))


def d_ds(f: np.ndarray, grid: CylGrid) -> np.ndarray:
    return np.gradient(f, grid.s, axis=0, edge_order=2)


def d_dz(f: np.ndarray, grid: CylGrid) -> np.ndarray:
    return np.gradient(f, grid.z, axis=1, edge_order=2)


def laplacian(f: np.ndarray, grid: CylGrid) -> np.ndarray:
    """3D Laplacian of an axisymmetric field: f_zz + f_ss + f_s / s.

    On the axis (s = 0) the radial part limits to 2 f_ss.
    """
    fs = d_ds(f, grid)
    fss = d_ds(fs, grid)
    fzz = d_dz(d_dz(f, grid), grid)
    out = np.empty_like(f)
    out[1:] = fzz[1:] + fss[1:] + fs[1:] / grid.s[1:, None]
    out[0] = fzz[0] + 2.0 * fss[0]
    return out


def march_up(g: np.ndarray, grid: CylGrid, anchor: np.ndarray) -> np.ndarray:
    """F(s, z) = anchor(s) + int_{z_min}^{z} g(s, z') dz' (trapezoid)."""
    dz = grid.dz
    inc = np.zeros_like(g)
    inc[:, 1:] = 0.5 * dz * (g[:, 1:] + g[:, :-1])
    return anchor[:, None] + np.cumsum(inc, axis=1)


def march_down(g: np.ndarray, grid: CylGrid, anchor: np.ndarray) -> np.ndarray:
    """F(s, z) = anchor(s) - int_{z}^{z_max} g(s, z') dz' (trapezoid)."""
    dz = grid.dz
    inc = np.zeros_like(g)
    inc[:, :-1] = 0.5 * dz * (g[:, 1:] + g[:, :-1])
    rev = np.cumsum(inc[:, ::-1], axis=1)[:, ::-1]
    return anchor[:, None] - rev


def interpolator(grid: CylGrid, f: np.ndarray, fill=0.0):
    return RegularGridInterpolator(
        (grid.s, grid.z), f, bounds_error=False, fill_value=fill
    )


def cyl_coords(points: np.ndarray, axis: np.ndarray):
    """(s, z) of 3D points relative to a unit axis vector."""
    points = np.atleast_2d(points)
    z = points @ axis
    perp = points - np.outer(z, axis)
    s = np.linalg.norm(perp, axis=1)
    return s, z


def off_cone_mask(grid: CylGrid, bad_z_sign: int, half_angle: float) -> np.ndarray:
    """True where the direction of (s, z) is outside the cone around the
    bad axis direction (z < 0 axis for bad_z_sign=-1, z > 0 for +1)."""
    ss, zz = grid.mesh()
    r = np.sqrt(ss * ss + zz * zz)
    with np.errstate(invalid="ignore"):
        cos_to_bad = bad_z_sign * zz / np.where(r > 0, r, 1.0)
    return ~((r > 0) & (cos_to_bad > np.cos(half_angle)))
