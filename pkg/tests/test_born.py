import numpy as np
import pytest

from scatterlab import born
from scatterlab.numerics import ParameterError
from scatterlab.potentials import PotentialModel

GAUSS = PotentialModel(kind="gaussian_well", v0=-1.0, width=1.0)


class TestFirstBorn:
    @pytest.mark.parametrize("g,mu,k,theta", [(0.1, 1.0, 2.0, np.pi / 2),
                                              (0.5, 2.0, 1.0, np.pi / 3),
                                              (-0.3, 0.5, 3.0, 2.0)])
    def test_yukawa_closed_form(self, g, mu, k, theta):
        model = PotentialModel(kind="yukawa", v0=g, width=1.0 / mu)
        q2 = (2 * k * np.sin(theta / 2)) ** 2
        assert born.born_first_amplitude(model, k, theta) == pytest.approx(
            -g / (q2 + mu * mu), rel=1e-8)

    def test_gaussian_closed_form(self):
        # f1(q) = -(v0 sqrt(pi)^3 / 4 pi) e^{-q^2/4} for v = v0 e^{-r^2}
        v0, k, theta = -1.0, 2.0, np.pi / 2
        q = 2 * k * np.sin(theta / 2)
        expect = -(v0 * np.pi**1.5 / (4 * np.pi)) * np.exp(-q * q / 4)
        assert born.born_first_amplitude(GAUSS, k, theta) == pytest.approx(
            expect, rel=1e-8)

    def test_forward_limit(self):
        # q -> 0: -(4 pi)^-1 int v = -v0 sqrt(pi)/4 for the unit gaussian
        val = born.born_first_amplitude(GAUSS, 1.0, 0.0)
        assert val == pytest.approx(-(-1.0) * np.sqrt(np.pi) / 4, rel=1e-8)

    def test_zero_potential(self):
        assert born.born_first_amplitude(PotentialModel(kind="zero"),
                                         1.0, 1.0) == 0.0

    def test_phase_shift_zero_potential(self):
        assert born.born_first_phase_shift(PotentialModel(kind="zero"),
                                           1.0, 0) == 0.0


class TestTransport:
    def test_b0_is_one(self):
        exp = born.transport_coefficients(GAUSS, [0, 0, 1],
                                          [[0.0, 0.0, 0.0]], 2)
        assert exp.b[0][0] == pytest.approx(1.0)

    def test_b1_ray_integral_oracle(self):
        # b1(0) = int_-inf^0 v(t w') dt = v0 sqrt(pi)/2 for the unit gaussian
        exp = born.transport_coefficients(GAUSS, [0, 0, 1],
                                          [[0.0, 0.0, 0.0]], 1)
        assert exp.b[1][0] == pytest.approx(-np.sqrt(np.pi) / 2, rel=1e-3)

    def test_long_range_rejected(self):
        tail = PotentialModel(kind="power_tail", v0=1.0, rho=1.0)
        with pytest.raises(Exception):
            born.transport_coefficients(tail, [0, 0, 1], [[0.0, 0.0, 0.0]], 1)


class TestKernel:
    def test_n0_matches_first_born(self):
        # k_0 = (i sqrt(lam) / 2 pi) f_1(q): an identity, not an expansion
        lam, theta = 4.0, np.pi / 3
        omega = np.array([0.0, 0.0, 1.0])
        omega_p = np.array([np.sin(theta), 0.0, np.cos(theta)])
        sample = born.high_energy_kernel(GAUSS, lam, omega, omega_p, 0)
        k = np.sqrt(lam)
        f1 = born.born_first_amplitude(GAUSS, k, theta)
        expect = 1j * k / (2 * np.pi) * f1
        assert sample.value == pytest.approx(expect, rel=1e-4)

    def test_zero_potential_kernel(self):
        sample = born.high_energy_kernel(PotentialModel(kind="zero"), 4.0,
                                         [0, 0, 1], [1, 0, 0], 2)
        assert sample.value == 0.0

    def test_coincident_directions_rejected(self):
        with pytest.raises(ParameterError):
            born.high_energy_kernel(GAUSS, 4.0, [0, 0, 1], [0, 0, 1], 0)

    def test_error_order_input_validation(self):
        with pytest.raises(ParameterError):
            born.measure_error_order(GAUSS, [25.0, 50.0], [0, 0, 1],
                                     [1, 0, 0], 0)
