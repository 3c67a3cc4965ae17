from __future__ import annotations

import math

import numpy as np
import pytest

from errors import DomainError, GridError, PositivityError
from hilbert import coherent_state, product_coherent_state
from model import ClassicalState
from observables import (
    fourier_spectrum,
    husimi_q,
    phase_grid,
    phase_statistics,
    population_observables,
    population_operators,
    purity,
    von_neumann_entropy,
)


def _projector(ket: np.ndarray) -> np.ndarray:
    return np.outer(ket, ket.conj())


class TestEntropyAndPurity:
    def test_maximally_mixed(self):
        rho = np.eye(21) / 21.0
        assert von_neumann_entropy(rho) == pytest.approx(3.04452, abs=1e-5)
        assert purity(rho) == pytest.approx(1.0 / 21.0)

    def test_two_level_mixture(self):
        assert von_neumann_entropy(np.diag([0.5, 0.5])) == pytest.approx(math.log(2.0))
        assert purity(np.diag([0.25, 0.75])) == pytest.approx(0.625)

    def test_pure_state(self):
        rho = _projector(coherent_state(1.0, 0.4, 3.0))
        assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-10)
        assert purity(rho) == pytest.approx(1.0)

    def test_stack(self):
        stack = np.stack([np.diag([1.0, 0.0]), np.diag([0.5, 0.5])])
        np.testing.assert_allclose(von_neumann_entropy(stack), [0.0, math.log(2.0)], atol=1e-12)

    def test_negative_eigenvalue(self):
        with pytest.raises(PositivityError):
            von_neumann_entropy(np.diag([1.1, -0.1]))
        with pytest.raises(PositivityError):
            purity(np.diag([1.1, -0.1]))


class TestPhaseDistribution:
    def test_grid(self):
        grid = phase_grid(2.0)
        assert grid.size == 5
        assert grid[0] == pytest.approx(-math.pi)
        np.testing.assert_allclose(np.diff(grid), 2.0 * math.pi / 5.0)

    def test_number_state_is_uniform(self):
        rho = np.zeros((7, 7))
        rho[2, 2] = 1.0
        distribution = phase_statistics(rho, 3.0)
        np.testing.assert_allclose(distribution.probabilities, 1.0 / 7.0)
        assert not distribution.shifted

    @pytest.mark.parametrize("phi", [0.3, -1.2, 3.0])
    def test_coherent_state_is_peaked(self, phi):
        S = 20.0
        distribution = phase_statistics(_projector(coherent_state(0.5 * math.pi, phi, S)), S)
        assert distribution.probabilities.sum() == pytest.approx(1.0)
        gap = math.remainder(distribution.mean - phi, 2.0 * math.pi)
        assert abs(gap) < 2.0 * math.pi / 41.0
        assert distribution.variance < 0.5

    def test_mode_near_the_cut_is_recentred(self):
        S = 20.0
        distribution = phase_statistics(_projector(coherent_state(0.5 * math.pi, math.pi - 0.05, S)), S)
        assert distribution.shifted
        assert distribution.variance < 0.5

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            phase_statistics(np.eye(3) / 3.0, 2.0)


class TestHusimi:
    def test_normalization_and_peak(self):
        S, theta, phi = 5.0, 1.2, 0.8
        grid = husimi_q(_projector(coherent_state(theta, phi, S)), S)
        assert grid.normalization() == pytest.approx(1.0, abs=1e-2)
        row, column = np.unravel_index(np.argmax(grid.values), grid.values.shape)
        assert grid.z[row] == pytest.approx(math.cos(theta), abs=0.05)
        assert grid.phi[column] == pytest.approx(phi, abs=0.1)
        assert grid.values.max() <= 1.0 / math.pi + 1e-12

    def test_mixed_state_is_spread(self):
        S = 5.0
        coherent = husimi_q(_projector(coherent_state(1.2, 0.8, S)), S, grid=(41, 40))
        mixed = husimi_q(np.eye(11) / 11.0, S, grid=(41, 40))
        assert mixed.participation_ratio() > coherent.participation_ratio()
        np.testing.assert_allclose(mixed.values, 1.0 / (11.0 * math.pi), atol=1e-12)

    def test_explicit_nodes(self):
        grid = husimi_q(np.eye(3) / 3.0, 1.0, z=[0.0, 0.5], phi=[0.0])
        assert grid.values.shape == (2, 1)


class TestFourierSpectrum:
    def test_peak_frequencies(self):
        times = np.linspace(0.0, 400.0, 4001)
        series = np.cos(1.204116 * times) + 0.6 * np.sin(0.685640 * times)
        spectrum = fourier_spectrum(series, times, n_peaks=2)
        assert spectrum.peaks[0] == pytest.approx(1.204116, abs=2e-3)
        assert spectrum.peaks[1] == pytest.approx(0.685640, abs=2e-3)
        assert spectrum.resolution == pytest.approx(2.0 * math.pi / (4001 * 0.1))

    def test_non_uniform_grid(self):
        times = np.array([0.0, 0.1, 0.3, 0.4])
        with pytest.raises(GridError):
            fourier_spectrum(np.zeros(4), times)

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            fourier_spectrum(np.zeros(5), np.linspace(0.0, 1.0, 4))


class TestPopulations:
    def test_operator_set(self):
        assert set(population_operators(1.0)) == {"z1", "z2", "z_minus_sq", "s1y", "s2y"}

    def test_product_coherent_state(self):
        S = 4.0
        point = ClassicalState(z1=0.6, phi1=0.5, z2=-0.2, phi2=-1.0)
        values = population_observables(product_coherent_state(point, S), S)
        assert float(values.z1) == pytest.approx(0.6)
        assert float(values.z2) == pytest.approx(-0.2)
        assert float(values.z_minus) == pytest.approx(0.4)
        assert float(values.z_plus) == pytest.approx(0.2)
        assert float(values.current1) == pytest.approx(-math.sqrt(1.0 - 0.36) * math.sin(0.5))
        # coherent spread: Var(S_iz) = S sin²θ_i / 2
        variance = (0.5 * S * 0.64 + 0.5 * S * 0.96) / (4.0 * S**2)
        assert float(values.delta_z_minus) == pytest.approx(math.sqrt(variance))

    def test_ket_matrix_and_stack_agree(self):
        S = 1.0
        psi = product_coherent_state(ClassicalState(z1=0.3, phi1=0.2, z2=-0.5, phi2=1.1), S)
        rho = _projector(psi)
        from_ket = population_observables(psi, S)
        from_matrix = population_observables(rho, S)
        from_stack = population_observables(np.stack([rho, rho, rho]), S)
        assert isinstance(from_matrix.z1, np.ndarray) and from_matrix.z1.shape == ()
        assert float(from_matrix.delta_z_minus) == pytest.approx(float(from_ket.delta_z_minus))
        assert float(from_matrix.current2) == pytest.approx(float(from_ket.current2))
        assert from_stack.z_minus.shape == (3,)
        np.testing.assert_allclose(from_stack.z_minus, float(from_ket.z_minus))
        assert from_ket.to_columns()["z_plus"].shape == (1,)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            population_observables(np.ones(4) / 2.0, 2.0)
