"""Numerical laboratory for quantum scattering of H = -Delta + v.

Units: hbar = 1, 2m = 1, so energy lambda = k^2.
"""

__version__ = "0.1.0"

__all__ = [
    "numerics",
    "potentials",
    "partialwave",
    "born",
    "eikonal",
    "propagator",
    "diagnostics",
]
