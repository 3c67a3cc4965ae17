from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import sparse

from errors import DomainError, PositivityError
from hilbert import (
    build_hamiltonian,
    build_spin_operators,
    check_density_matrix,
    coherent_state,
    expectation,
    jump_operators,
    lindblad_evolve,
    lindblad_rhs,
    lindblad_steady_state,
    product_coherent_state,
    species_swap,
    to_dense,
    two_spin_operators,
    vectorized_generator,
)
from model import ClassicalState, ModelParams


@pytest.mark.parametrize("S", [0.5, 1.0, 2.5, 10.0])
def test_spin_algebra(S):
    ops = build_spin_operators(S)
    np.testing.assert_allclose(ops.Sx @ ops.Sy - ops.Sy @ ops.Sx, 1j * ops.Sz, atol=1e-12)
    casimir = ops.Sx @ ops.Sx + ops.Sy @ ops.Sy + ops.Sz @ ops.Sz
    np.testing.assert_allclose(casimir, S * (S + 1.0) * np.eye(ops.dim), atol=1e-10)
    assert ops.Sz[0, 0] == S


def test_invalid_spin():
    with pytest.raises(DomainError):
        build_spin_operators(0.7)


def test_large_spins_switch_to_sparse():
    assert sparse.issparse(two_spin_operators(10.0).S1z)
    assert not sparse.issparse(two_spin_operators(2.0).S1z)


class TestCoherentStates:
    def test_north_pole(self):
        state = coherent_state(0.0, 1.3, 3.0)
        expected = np.zeros(7)
        expected[0] = 1.0
        np.testing.assert_allclose(state, expected)

    def test_bloch_vector(self):
        S, theta, phi = 5.0, 1.1, 0.7
        ops = build_spin_operators(S)
        state = coherent_state(theta, phi, S)
        assert expectation(ops.Sx, state).real == pytest.approx(S * math.sin(theta) * math.cos(phi))
        assert expectation(ops.Sy, state).real == pytest.approx(S * math.sin(theta) * math.sin(phi))
        assert expectation(ops.Sz, state).real == pytest.approx(S * math.cos(theta))

    def test_no_underflow_near_south_pole(self):
        state = coherent_state(math.pi - 1e-3, 0.0, 500.0)
        assert np.all(np.isfinite(state))
        assert np.linalg.norm(state) == pytest.approx(1.0)

    def test_theta_out_of_range(self):
        with pytest.raises(DomainError):
            coherent_state(-0.1, 0.0, 1.0)

    def test_product_state_matches_classical_point(self):
        point = ClassicalState(z1=0.6, phi1=0.0, z2=-0.2, phi2=0.5)
        ops = two_spin_operators(4.0)
        psi = product_coherent_state(point, 4.0)
        assert expectation(ops.S1z, psi).real / 4.0 == pytest.approx(0.6)
        assert expectation(ops.S2z, psi).real / 4.0 == pytest.approx(-0.2)


class TestOperators:
    def test_hamiltonian_is_hermitian_and_exchange_symmetric(self):
        params = ModelParams(V=1.7, gamma=0.2, omega_z=0.5, S=2)
        hamiltonian = to_dense(build_hamiltonian(params))
        swap = species_swap(2.0)
        np.testing.assert_allclose(hamiltonian, hamiltonian.conj().T, atol=1e-12)
        np.testing.assert_allclose(swap @ hamiltonian @ swap, hamiltonian, atol=1e-12)
        np.testing.assert_allclose(swap @ swap, np.eye(25))

    def test_sparse_and_dense_agree(self):
        params = ModelParams(V=0.5, gamma=0.2, S=1.5)
        dense = build_hamiltonian(params)
        np.testing.assert_allclose(to_dense(build_hamiltonian(params, use_sparse=True)), dense, atol=1e-14)

    def test_jump_rate(self):
        params = ModelParams(gamma=0.4, S=2)
        first, _ = jump_operators(params)
        ops = two_spin_operators(2.0)
        np.testing.assert_allclose(to_dense(first), math.sqrt(0.4 / 2.0) * to_dense(ops.S1m))

    def test_expectation_over_density_stack(self):
        ops = two_spin_operators(1.0)
        psi = product_coherent_state(ClassicalState.symmetric(0.5, 0.0), 1.0)
        rho = np.outer(psi, psi.conj())
        values = expectation(ops.S1z, np.stack([rho, rho]))
        np.testing.assert_allclose(values, [0.5, 0.5])
        with pytest.raises(DomainError):
            expectation(ops.S1z, np.zeros((2, 3)))


class TestDensityMatrices:
    def test_validation(self):
        with pytest.raises(DomainError):
            check_density_matrix(np.array([[0.5, 0.1], [0.0, 0.5]]))
        with pytest.raises(DomainError):
            check_density_matrix(np.eye(2))
        with pytest.raises(PositivityError):
            check_density_matrix(np.diag([1.5, -0.5]))

    def test_vectorization_convention(self):
        params = ModelParams(V=1.7, gamma=0.2, omega_z=0.5, S=1)
        rng = np.random.default_rng(0)
        rho = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        superop = vectorized_generator(params)
        applied = (superop @ rho.ravel(order="F")).reshape(9, 9, order="F")
        np.testing.assert_allclose(applied, lindblad_rhs(rho, params), atol=1e-12)
        np.testing.assert_allclose(
            vectorized_generator(params, use_sparse=True).toarray(), superop, atol=1e-12
        )

    @pytest.mark.parametrize("S", [0.5, 1.5, 4.0])
    def test_generator_commutes_with_species_exchange(self, S):
        params = ModelParams(V=1.7, gamma=0.2, omega_z=0.5, S=S)
        dim = params.dim**2
        rng = np.random.default_rng(3)
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        swap = species_swap(S)
        np.testing.assert_allclose(
            lindblad_rhs(swap @ rho @ swap, params), swap @ lindblad_rhs(rho, params) @ swap, atol=1e-10
        )

    def test_exchanged_start_gives_exchanged_evolution(self):
        params = ModelParams(V=1.7, gamma=0.2, omega_z=0.5, S=1)
        psi = product_coherent_state(ClassicalState(z1=0.5, phi1=0.0, z2=-0.3, phi2=1.0), 1.0)
        swap = species_swap(1.0)
        times = np.linspace(0.0, 3.0, 7)
        forward = lindblad_evolve(psi, params, times)
        exchanged = lindblad_evolve(swap @ psi, params, times)
        for rho, partner in zip(forward.rhos, exchanged.rhos):
            np.testing.assert_allclose(swap @ rho @ swap, partner, atol=1e-7)

    def test_master_equation_preserves_a_state(self):
        params = ModelParams(V=1.7, gamma=0.2, S=1)
        psi = product_coherent_state(ClassicalState(z1=0.5, phi1=0.0, z2=-0.3, phi2=1.0), 1.0)
        series = lindblad_evolve(psi, params, np.linspace(0.0, 5.0, 11))
        np.testing.assert_allclose(series.trace(), 1.0, atol=1e-9)
        for rho in series.rhos:
            np.testing.assert_allclose(rho, rho.conj().T, atol=1e-9)
            assert np.linalg.eigvalsh(rho)[0] > -1e-8

    def test_steady_state(self):
        params = ModelParams(V=0.5, gamma=0.3, S=1)
        rho = lindblad_steady_state(params)
        assert np.trace(rho).real == pytest.approx(1.0)
        np.testing.assert_allclose(lindblad_rhs(rho, params), 0.0, atol=1e-9)
