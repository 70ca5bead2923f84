import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatterlab import born, partialwave
from scatterlab.numerics import ParameterError
from scatterlab.potentials import PotentialModel

GAUSS = PotentialModel(kind="gaussian_well", v0=-1.0, width=1.0)


def square_well_delta0(v0: float, R: float, k: float) -> float:
    """Closed s-wave matching formula for the spherical step potential."""
    k1sq = k * k - v0
    if abs(k1sq) < 1e-12:
        slope = k * R
    elif k1sq > 0:
        k1 = np.sqrt(k1sq)
        slope = (k / k1) * np.tan(k1 * R)
    else:
        kap = np.sqrt(-k1sq)
        slope = (k / kap) * np.tanh(kap * R)
    delta = np.arctan(slope) - k * R
    return (delta + np.pi / 2) % np.pi - np.pi / 2


class TestPhaseShift:
    @pytest.mark.parametrize("v0,k", [(1.0, 1.0), (-1.0, 1.0), (0.5, 2.0),
                                      (-2.0, 0.7), (4.0, 1.5)])
    def test_square_well_oracle(self, v0, k):
        model = PotentialModel(kind="square_well", v0=v0, width=1.0)
        delta = partialwave.radial_phase_shift(model, 0, k)
        assert delta == pytest.approx(square_well_delta0(v0, 1.0, k),
                                      abs=1e-6)

    def test_zero_potential_zero_shift(self):
        model = PotentialModel(kind="zero")
        table = partialwave.phase_shift_table(model, 1.3, 8)
        assert np.all(table.delta == 0.0)

    def test_weak_coupling_matches_born(self):
        model = PotentialModel(kind="gaussian_well", v0=-0.01, width=1.0)
        for l in (0, 1, 2):
            exact = partialwave.radial_phase_shift(model, l, 1.5)
            first = born.born_first_phase_shift(model, 1.5, l)
            assert exact == pytest.approx(first, rel=2e-2, abs=1e-8)

    def test_range_convention(self):
        delta = partialwave.radial_phase_shift(GAUSS, 0, 0.8)
        assert -np.pi / 2 < delta <= np.pi / 2

    def test_invalid_inputs(self):
        with pytest.raises(ParameterError):
            partialwave.radial_phase_shift(GAUSS, 0, -1.0)
        with pytest.raises(ParameterError):
            partialwave.radial_phase_shift(GAUSS, -1, 1.0)

    @given(st.floats(0.5, 3.0), st.integers(0, 4))
    @settings(max_examples=15, deadline=None)
    def test_shift_in_principal_branch(self, k, l):
        delta = partialwave.radial_phase_shift(GAUSS, l, k)
        assert -np.pi / 2 < delta <= np.pi / 2


class TestSMatrix:
    def test_unitarity(self):
        table = partialwave.phase_shift_table(GAUSS, 2.0, 20)
        eigs, mult = partialwave.smatrix_eigenvalues(table)
        assert np.allclose(np.abs(eigs), 1.0, atol=1e-14)
        assert np.all(mult == 2 * np.arange(21) + 1)

    def test_accumulation_at_one(self):
        table = partialwave.phase_shift_table(GAUSS, 2.0, 25)
        eigs, _ = partialwave.smatrix_eigenvalues(table)
        assert np.max(np.abs(eigs[20:] - 1.0)) < 1e-3

    def test_in_out_ratio_is_smatrix_eigenvalue(self):
        k, l = 1.3, 1
        delta = partialwave.radial_phase_shift(GAUSS, l, k)
        r_samples = np.linspace(9.0, 12.0, 24)
        b_minus, b_plus = partialwave.radial_in_out_decomposition(
            GAUSS, l, k, r_samples)
        ratio = b_plus / b_minus
        assert ratio == pytest.approx(np.exp(2j * delta), abs=1e-5)

    def test_free_decomposition_normalization(self):
        b_minus, b_plus = partialwave.radial_in_out_decomposition(
            PotentialModel(kind="zero"), 2, 1.0, np.linspace(8.0, 11.0, 16))
        assert b_minus == pytest.approx(1.0, abs=1e-9)
        assert b_plus == pytest.approx(1.0, abs=1e-9)

    def test_samples_inside_potential_rejected(self):
        with pytest.raises(ParameterError):
            partialwave.radial_in_out_decomposition(
                GAUSS, 0, 1.0, np.linspace(1.0, 2.0, 8))


class TestAmplitude:
    def test_forward_requires_flag(self):
        table = partialwave.phase_shift_table(GAUSS, 1.0, 10)
        with pytest.raises(ParameterError):
            partialwave.amplitude(table, 0.0)
        partialwave.amplitude(table, 0.0, allow_forward=True)

    def test_optical_theorem(self):
        # Im a(0) = (k / 4 pi) sigma_tot for a unitary truncated sum
        k = 1.5
        table = partialwave.phase_shift_table(GAUSS, k, 25)
        a0 = partialwave.amplitude(table, 0.0, allow_forward=True)
        sigma = (4 * np.pi / k**2) * np.sum(
            (2 * np.arange(26) + 1) * np.sin(table.delta) ** 2)
        assert a0.imag == pytest.approx(k * sigma / (4 * np.pi), rel=1e-10)

    def test_kernel_matches_pointwise(self):
        table = partialwave.phase_shift_table(GAUSS, 1.0, 15)
        thetas = np.linspace(0.2, np.pi, 7)
        kern = partialwave.amplitude_kernel(table, thetas)
        for th, val in zip(thetas, kern.values):
            assert val == pytest.approx(partialwave.amplitude(table, float(th)),
                                        rel=1e-12)
