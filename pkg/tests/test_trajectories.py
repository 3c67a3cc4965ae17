from __future__ import annotations

import numpy as np
import pytest
from pydantic import ValidationError

from errors import DomainError, GridError, StepSizeError
from hilbert import lindblad_evolve, product_coherent_state, species_swap, two_spin_operators
from model import ClassicalState, ModelParams
from observables import purity
from trajectories import (
    JumpScheme,
    Species,
    TrajectoryConfig,
    coherence_mass,
    ensemble_evolve,
    evolve_trajectory,
    reduced_density,
)
from utils.seeding import derive_rng

START = ClassicalState(z1=0.5, phi1=0.0, z2=-0.3, phi2=1.0)


def _trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


class TestConfig:
    def test_seed_is_required(self):
        with pytest.raises(ValidationError):
            TrajectoryConfig()

    def test_jump_budget(self):
        params = ModelParams(V=0.5, gamma=0.2, S=50)
        TrajectoryConfig(seed=0, dt=2e-3).check(params)
        with pytest.raises(StepSizeError):
            TrajectoryConfig(seed=0, dt=1e-2).check(params)

    def test_channel_rate(self):
        params = ModelParams(gamma=0.2, S=1)
        # S(S+1) - m(m-1) over m = 1, 0, -1 is 2, 2, 0
        assert TrajectoryConfig(seed=0).max_channel_rate(params) == pytest.approx(0.2 * 2.0)


class TestReducedStates:
    def test_product_state_is_pure(self):
        psi = product_coherent_state(START, 2.0)
        for species in (Species.FIRST, Species.SECOND):
            assert purity(reduced_density(psi, species)) == pytest.approx(1.0)

    def test_singlet_is_maximally_mixed(self):
        singlet = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
        np.testing.assert_allclose(reduced_density(singlet, 1), 0.5 * np.eye(2), atol=1e-15)
        np.testing.assert_allclose(reduced_density(np.outer(singlet, singlet), 2), 0.5 * np.eye(2), atol=1e-15)

    def test_ket_and_matrix_agree(self):
        psi = product_coherent_state(START, 1.5)
        rho = np.outer(psi, psi.conj())
        for species in (1, 2):
            np.testing.assert_allclose(reduced_density(psi, species), reduced_density(rho, species), atol=1e-14)

    def test_rejects_non_square_dimension(self):
        with pytest.raises(DomainError):
            reduced_density(np.ones(5), 1)

    def test_coherence_mass(self):
        assert coherence_mass(np.diag([0.3, 0.7])) == 0.0
        assert coherence_mass(np.array([[0.5, 0.25j], [-0.25j, 0.5]])) == pytest.approx(0.5)


class TestSingleTrajectory:
    def test_states_stay_normalized(self):
        params = ModelParams(V=1.7, gamma=0.2, S=2)
        psi = product_coherent_state(START, 2.0)
        times = np.linspace(0.0, 4.0, 21)
        path = evolve_trajectory(psi, params, TrajectoryConfig(seed=0), derive_rng(0, "test"), times)
        np.testing.assert_allclose(np.linalg.norm(path.states, axis=1), 1.0, atol=1e-10)
        assert np.all((path.jumps.times > 0.0) & (path.jumps.times <= 4.0 + 1e-12))
        assert set(path.jumps.channels.tolist()) <= {1, 2}
        assert path.jumps.counts().sum() == path.jumps.times.size

    def test_rejects_unnormalized_start(self):
        params = ModelParams(gamma=0.2, S=1)
        with pytest.raises(DomainError):
            evolve_trajectory(np.ones(9), params, TrajectoryConfig(seed=0), derive_rng(0, "test"), [0.0, 0.1])

    def test_grid_on_step_lattice(self):
        params = ModelParams(gamma=0.2, S=1)
        psi = product_coherent_state(START, 1.0)
        with pytest.raises(GridError):
            evolve_trajectory(psi, params, TrajectoryConfig(seed=0), derive_rng(0, "test"), [0.0, 0.0031])


class TestEnsemble:
    def test_closed_system_is_exact(self):
        params = ModelParams(V=1.7, omega_z=0.5, S=1)
        psi = product_coherent_state(START, 1.0)
        times = np.linspace(0.0, 2.0, 11)
        result = ensemble_evolve(psi, params, TrajectoryConfig(seed=1, n_traj=2, dt=1e-3), times)
        oracle = lindblad_evolve(psi, params, times)
        assert result.jump_counts.sum() == 0
        for rho, exact in zip(result.rho, oracle.rhos):
            assert _trace_distance(rho, exact) < 1e-6

    @pytest.mark.parametrize("scheme", [JumpScheme.FIRST_ORDER, JumpScheme.WAITING_TIME])
    def test_matches_master_equation(self, scheme):
        params = ModelParams(V=1.7, gamma=0.4, S=1)
        psi = product_coherent_state(START, 1.0)
        times = np.linspace(0.0, 1.0, 6)
        ops = two_spin_operators(1.0)
        config = TrajectoryConfig(seed=2, n_traj=600, dt=2e-3, scheme=scheme)
        result = ensemble_evolve(psi, params, config, times, operators={"S1z": ops.S1z})
        oracle = lindblad_evolve(psi, params, times)
        exact = np.real(np.einsum("ij,tji->t", ops.S1z, oracle.rhos))
        error = result.standard_error("S1z")
        assert np.all(np.abs(result.expectations["S1z"] - exact) <= 5.0 * error + 1e-3)
        assert result.mean_jump_rate() > 0.0

    def test_reduced_matrices_match_full_state(self):
        params = ModelParams(V=1.7, gamma=0.2, S=1)
        psi = product_coherent_state(START, 1.0)
        config = TrajectoryConfig(seed=3, n_traj=8)
        result = ensemble_evolve(psi, params, config, np.linspace(0.0, 0.4, 3), keep_reduced=True)
        np.testing.assert_allclose(result.reduced[0], reduced_density(result.rho, 1), atol=1e-12)
        np.testing.assert_allclose(result.reduced[1], reduced_density(result.rho, 2), atol=1e-12)

    def test_reproducible_for_any_worker_count(self, sequential_config):
        params = ModelParams(V=1.7, gamma=0.2, S=1)
        psi = product_coherent_state(START, 1.0)
        config = TrajectoryConfig(seed=4, n_traj=12, batch_size=3)
        times = np.linspace(0.0, 0.4, 3)
        sequential = ensemble_evolve(psi, params, config, times)
        sequential_config.threads = 3
        parallel = ensemble_evolve(psi, params, config, times)
        np.testing.assert_array_equal(sequential.rho, parallel.rho)
        np.testing.assert_array_equal(sequential.jump_counts, parallel.jump_counts)

    def test_batch_size_does_not_change_trajectories(self):
        params = ModelParams(V=1.7, gamma=0.2, S=1)
        psi = product_coherent_state(START, 1.0)
        times = np.linspace(0.0, 0.4, 3)
        small = ensemble_evolve(psi, params, TrajectoryConfig(seed=5, n_traj=6, batch_size=2), times)
        large = ensemble_evolve(psi, params, TrajectoryConfig(seed=5, n_traj=6, batch_size=6), times)
        np.testing.assert_array_equal(small.jump_counts, large.jump_counts)
        np.testing.assert_allclose(small.rho, large.rho, atol=1e-13)

    def test_exchanged_start_gives_exchanged_statistics(self):
        params = ModelParams(V=1.7, gamma=0.4, omega_z=0.5, S=1)
        psi = product_coherent_state(START, 1.0)
        swapped = species_swap(1.0) @ psi
        mirrored = ClassicalState(z1=START.z2, phi1=START.phi2, z2=START.z1, phi2=START.phi1)
        np.testing.assert_allclose(swapped, product_coherent_state(mirrored, 1.0), atol=1e-14)

        times = np.linspace(0.0, 1.0, 6)
        ops = two_spin_operators(1.0)
        operators = {"S1z": ops.S1z, "S2z": ops.S2z}
        config = TrajectoryConfig(seed=6, n_traj=600, dt=2e-3)
        forward = ensemble_evolve(psi, params, config, times, operators=operators)
        backward = ensemble_evolve(swapped, params, config.model_copy(update={"seed": 7}), times, operators=operators)
        for own, other in (("S1z", "S2z"), ("S2z", "S1z")):
            error = forward.standard_error(own) + backward.standard_error(other)
            assert np.all(np.abs(forward.expectations[own] - backward.expectations[other]) <= 5.0 * error + 1e-3)
        np.testing.assert_allclose(forward.jump_counts.mean(axis=0), backward.jump_counts.mean(axis=0)[::-1], atol=0.15)
