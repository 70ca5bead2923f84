import numpy as np
import pytest

from scatterlab import eikonal
from scatterlab.numerics import DomainError, ParameterError
from scatterlab.potentials import PotentialModel

GAUSS = PotentialModel(kind="gaussian_well", v0=-1.0, width=1.0)
TAIL2 = PotentialModel(kind="power_tail", v0=1.0, rho=2.0)
TAIL1 = PotentialModel(kind="power_tail", v0=0.5, rho=1.0)
ZAXIS = np.array([0.0, 0.0, 1.0])


class TestPhaseIntegral:
    @pytest.mark.parametrize("s", [1.0, 5.0, 20.0])
    @pytest.mark.parametrize("xi", [1.0, 5.0])
    def test_rho2_closed_form(self, s, xi):
        x = np.array([s, 0.0, 0.0])
        val = eikonal.eikonal_phase_integral(TAIL2, x, xi * ZAXIS, +1)
        closed = (np.pi * TAIL2.v0 / (4 * xi)) * ((1 + s * s) ** -0.5 - 1.0)
        assert val == pytest.approx(closed, abs=1e-8)

    @pytest.mark.parametrize("s,xi", [(1.0, 1.0), (4.0, 2.5)])
    def test_rho1_closed_form(self, s, xi):
        x = np.array([s, 0.0, 0.0])
        closed = -(TAIL1.v0 / (2 * xi)) * np.log(np.sqrt(1 + s * s))
        val = eikonal.eikonal_phase_integral(TAIL1, x, xi * ZAXIS, +1)
        assert val == pytest.approx(closed, abs=1e-8)
        val_m = eikonal.eikonal_phase_integral(TAIL1, x, xi * ZAXIS, -1)
        assert val_m == pytest.approx(-closed, abs=1e-8)

    def test_reflection_identity(self):
        # Phi_-(x, xi) = -Phi_+(-x, xi)
        rng = np.random.default_rng(3)
        for _ in range(4):
            x = rng.normal(size=3) * 3.0
            if abs(x[2]) / np.linalg.norm(x) > 0.9:
                x[2] = 0.1
            plus = eikonal.eikonal_phase_integral(GAUSS, -x, 2.0 * ZAXIS, +1)
            minus = eikonal.eikonal_phase_integral(GAUSS, x, 2.0 * ZAXIS, -1)
            assert minus == pytest.approx(-plus, abs=1e-9)

    def test_cone_rejected(self):
        # x in the backward cone for the + sign is outside the domain
        with pytest.raises(DomainError):
            eikonal.eikonal_phase_integral(GAUSS, [0.0, 0.0, -5.0],
                                           2.0 * ZAXIS, +1)

    def test_too_slow_decay_rejected(self):
        slow = PotentialModel(kind="power_tail", v0=1.0, rho=0.4)
        with pytest.raises(Exception):
            eikonal.eikonal_phase_integral(slow, [1.0, 0.0, 0.0],
                                           2.0 * ZAXIS, +1)


class TestIteration:
    def test_default_orders(self):
        assert eikonal.default_n0(2.0) == 0
        assert eikonal.default_n0(1.5) == 0
        assert eikonal.default_n0(1.0) == 2
        assert eikonal.default_n0(0.75) == 2

    def test_phi1_solves_ray_equation(self):
        # (2|xi|)^{-1} phi_1 equals the exact ray integral Phi
        data = eikonal.eikonal_iterate(GAUSS, ZAXIS, 5.0, N0=1)
        phi1_scaled = data.phi_n[1] / (2 * data.xi_norm)
        assert np.max(np.abs(phi1_scaled - data.Phi)) < 1e-10

    def test_phi_at_matches_quadrature(self):
        data = eikonal.eikonal_iterate(GAUSS, ZAXIS, 5.0, N0=1)
        pts = np.array([[1.0, 0.5, 2.0], [0.2, -0.4, 0.0]])
        direct = np.array([
            eikonal.eikonal_phase_integral(GAUSS, p, 5.0 * ZAXIS, +1)
            for p in pts])
        assert np.allclose(data.Phi_at(pts), direct, atol=2e-4)

    def test_zero_n0_means_no_phase(self):
        data = eikonal.eikonal_iterate(GAUSS, ZAXIS, 5.0)
        assert data.N0 == 0
        assert np.all(data.Phi == 0.0)

    def test_n0_zero_rejected_for_long_range(self):
        with pytest.raises(ParameterError):
            eikonal.eikonal_iterate(TAIL1, ZAXIS, 5.0, N0=0)


class TestTransport:
    def test_zero_potential_trivial(self):
        data = eikonal.eikonal_iterate(PotentialModel(kind="zero"),
                                       ZAXIS, 5.0)
        sol = eikonal.transport_solve(PotentialModel(kind="zero"), data, 2)
        assert sol.residual_norm < 1e-12
        assert np.allclose(sol.b_n[1], 0.0)

    def test_b0_is_one(self):
        data = eikonal.eikonal_iterate(GAUSS, ZAXIS, 5.0)
        sol = eikonal.transport_solve(GAUSS, data, 1)
        assert np.all(sol.b_n[0] == 1.0)

    def test_residual_lambda_scaling(self):
        # ||residual|| ~ lambda^{-N/2} at fixed N with Phi = 0
        norms = {}
        for lam in (25.0, 100.0):
            data = eikonal.eikonal_iterate(GAUSS, ZAXIS, np.sqrt(lam))
            norms[lam] = eikonal.transport_solve(GAUSS, data, 1).residual_norm
        slope = np.log(norms[100.0] / norms[25.0]) / np.log(4.0)
        assert slope == pytest.approx(-0.5, abs=0.05)


class TestS0:
    def test_taper_profile(self):
        u = np.linspace(-0.5, 1.5, 101)
        vals = eikonal._taper_profile(u)
        assert vals[0] == 1.0 and vals[-1] == 0.0
        assert np.all(np.diff(vals) <= 1e-14)

    def test_reciprocity(self):
        # radial v: s0(omega, omega') = s0(omega', omega)
        lam = 25.0
        sols = eikonal.s0_solutions(GAUSS, lam, 1)
        th = np.deg2rad(20.0)
        e1 = np.array([1.0, 0.0, 0.0])
        w = np.cos(th / 2) * ZAXIS + np.sin(th / 2) * e1
        wp = np.cos(th / 2) * ZAXIS - np.sin(th / 2) * e1
        a = eikonal.s0_kernel(GAUSS, lam, w, wp, ZAXIS, N=1, solutions=sols)
        b = eikonal.s0_kernel(GAUSS, lam, wp, w, ZAXIS, N=1, solutions=sols)
        assert a.value == pytest.approx(b.value, rel=1e-6)

    def test_cap_restriction(self):
        sols = None
        with pytest.raises(ParameterError):
            eikonal.s0_kernel(GAUSS, 25.0, [1, 0, 0], [0, 1, 0],
                              ZAXIS, N=1, solutions=sols)

    def test_coincident_directions_rejected(self):
        with pytest.raises(ParameterError):
            eikonal.s0_kernel(GAUSS, 25.0, ZAXIS, ZAXIS, ZAXIS, N=1)

    def test_diagonal_probe_validation(self):
        with pytest.raises(ParameterError):
            eikonal.diagonal_exponent_probe(TAIL1, 25.0, ZAXIS,
                                            [0.5, 0.4, 0.3])
