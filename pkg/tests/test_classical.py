from __future__ import annotations

import math

import numpy as np
import pytest

from classical import (
    RegionSpec,
    atomic_current,
    conserved_R,
    conserved_R_series,
    decorrelator,
    draw_members,
    ensemble_mean,
    evolve_classical,
    evolve_ensemble,
    evolve_symmetric,
    growth_rate,
    integrate,
    island_mask,
    lyapunov_exponent,
    pair_decorrelation,
    participation_ratio,
    phase_space_density,
    sample_region,
    time_averaged_current,
)
from errors import DomainError, EmptyRegionError, SingularInputError
from model import ClassicalState, Family, ModelParams, Representation, canonical_to_cartesian, energy, fixed_points
from observables import fourier_spectrum


def _fixed_point(params: ModelParams, family: Family, branch: int = 0) -> ClassicalState:
    return next(fp.location for fp in fixed_points(params) if fp.family == family and fp.branch == branch)


class TestIntegration:
    def test_spin_length_is_preserved(self, chaotic):
        x0 = ClassicalState(z1=0.4, phi1=0.3, z2=-0.2, phi2=2.0)
        trajectory = evolve_classical(x0, chaotic, np.linspace(0, 50, 501))
        np.testing.assert_allclose(trajectory.norms(), 1.0, atol=1e-8)
        assert trajectory.representation == Representation.CARTESIAN

    def test_charts_agree(self, oscillatory):
        x0 = ClassicalState(z1=0.3, phi1=0.5, z2=-0.1, phi2=1.0)
        times = np.linspace(0.0, 10.0, 101)
        cartesian = evolve_classical(x0, oscillatory, times)
        canonical = evolve_classical(x0, oscillatory, times, chart=Representation.CANONICAL)
        assert canonical.representation == Representation.CANONICAL
        np.testing.assert_allclose(canonical.spins, cartesian.spins, atol=1e-7)

    def test_canonical_chart_falls_back_at_the_pole(self, oscillatory):
        x0 = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 1.0])
        trajectory = evolve_classical(x0, oscillatory, [0.0, 1.0], chart=Representation.CANONICAL)
        assert trajectory.representation == Representation.CARTESIAN

    def test_rejects_non_increasing_grid(self, oscillatory):
        with pytest.raises(ValueError):
            evolve_classical(ClassicalState.symmetric(0.1, 0.0), oscillatory, [0.0, 1.0, 0.5])

    def test_closed_system_conserves_energy(self):
        params = ModelParams(V=1.7, gamma=0.0)
        x0 = ClassicalState(z1=0.4, phi1=0.3, z2=-0.2, phi2=2.0)
        trajectory = evolve_classical(x0, params, np.linspace(0, 100, 201))
        values = energy(trajectory.spins, params)
        assert np.max(np.abs(values - values[0])) < 1e-8

    def test_symmetric_reduction_matches_full_flow(self, oscillatory):
        times = np.linspace(0.0, 20.0, 201)
        reduced = evolve_symmetric(0.3, 0.4, oscillatory, times)
        full = evolve_classical(ClassicalState.symmetric(0.3, 0.4), oscillatory, times)
        np.testing.assert_allclose(reduced.spins, full.spins, atol=1e-8)

    def test_species_exchange_is_bit_identical(self, chaotic):
        x0 = ClassicalState(z1=0.4, phi1=0.3, z2=-0.2, phi2=2.0)
        swapped = ClassicalState(z1=x0.z2, phi1=x0.phi2, z2=x0.z1, phi2=x0.phi1)
        times = np.linspace(0.0, 50.0, 501)
        for chart in (Representation.CARTESIAN, Representation.CANONICAL):
            forward = evolve_classical(x0, chaotic, times, chart=chart)
            backward = evolve_classical(swapped, chaotic, times, chart=chart)
            np.testing.assert_array_equal(forward.spins, backward.spins[:, [3, 4, 5, 0, 1, 2]])

    def test_tilt_keeps_the_symmetric_class(self, chaotic):
        trajectory = evolve_classical(ClassicalState.symmetric(0.3, 1.0), chaotic, np.linspace(0.0, 100.0, 1001))
        assert np.max(np.abs(trajectory.spins[:, :3] - trajectory.spins[:, 3:])) < 1e-9

    def test_generic_state_reaches_the_attractor(self, attractor):
        target = canonical_to_cartesian(_fixed_point(attractor, Family.FP_III, branch=-1).as_array())
        x0 = ClassicalState(z1=0.3, phi1=0.5, z2=-0.2, phi2=1.0)
        trajectory = evolve_classical(x0, attractor, [0.0, 250.0, 500.0])
        assert np.linalg.norm(trajectory.spins[-1] - target) < 1e-4


class TestSmallOscillations:
    def test_in_phase_mode_is_the_soft_one(self, oscillatory):
        times = np.arange(0.0, 400.0 + 1e-9, 0.05)
        center = _fixed_point(oscillatory, Family.FP_I)
        spectrum = fourier_spectrum(evolve_symmetric(0.05, center.phi1, oscillatory, times).z_plus, times)
        assert spectrum.peaks[0] == pytest.approx(0.685640, abs=spectrum.resolution)

    def test_out_of_phase_mode_is_the_stiff_one(self, oscillatory):
        times = np.arange(0.0, 400.0 + 1e-9, 0.05)
        center = _fixed_point(oscillatory, Family.FP_I)
        start = ClassicalState(z1=0.03, phi1=center.phi1, z2=-0.03, phi2=center.phi2)
        trajectory = evolve_classical(start, oscillatory, times)
        spectrum = fourier_spectrum(trajectory.z_minus, times)
        assert spectrum.peaks[0] == pytest.approx(1.204116, abs=spectrum.resolution)


class TestEnsembles:
    def test_region_sampling_is_reproducible(self):
        region = RegionSpec(z_min=-0.5, z_max=0.5, n_members=40)
        first, second = sample_region(region, seed=7), sample_region(region, seed=7)
        np.testing.assert_array_equal(first, second)
        assert first.shape == (40, 4)
        assert np.all(np.abs(first[:, [0, 2]]) <= 0.5)
        assert not np.array_equal(first, sample_region(region, seed=8))

    def test_symmetric_region(self):
        states = sample_region(RegionSpec(symmetric=True, n_members=10), seed=1)
        np.testing.assert_array_equal(states[:, :2], states[:, 2:])

    @pytest.mark.parametrize(
        "bounds",
        [{"n_members": 0}, {"z_min": 0.5, "z_max": 0.5}, {"phi_min": 1.0, "phi_max": -1.0}],
    )
    def test_empty_region(self, bounds):
        with pytest.raises(EmptyRegionError):
            RegionSpec(**bounds)

    def test_ensemble_is_independent_of_block_size(self, chaotic):
        spins0 = canonical_to_cartesian(sample_region(RegionSpec(n_members=12), seed=3))
        times = np.linspace(0.0, 5.0, 11)
        small = evolve_ensemble(spins0, chaotic, times, block_size=4)
        large = evolve_ensemble(spins0, chaotic, times, block_size=12)
        assert small.shape == (11, 12, 6)
        np.testing.assert_allclose(ensemble_mean(small, block_size=4), ensemble_mean(large, block_size=12), atol=1e-12)

    def test_worker_count_does_not_change_results(self, chaotic, sequential_config):
        spins0 = canonical_to_cartesian(sample_region(RegionSpec(n_members=8), seed=5))
        times = np.linspace(0.0, 5.0, 6)
        sequential = evolve_ensemble(spins0, chaotic, times, block_size=2)
        sequential_config.threads = 2
        parallel = evolve_ensemble(spins0, chaotic, times, block_size=2)
        np.testing.assert_array_equal(sequential, parallel)


class TestIslandScreen:
    def test_fp4_centres_are_trapped(self, attractor):
        starts = [
            _fixed_point(attractor, Family.FP_IV, branch=1),
            _fixed_point(attractor, Family.FP_IV, branch=-1),
            _fixed_point(attractor, Family.FP_III, branch=-1),
            ClassicalState.symmetric(0.3, 0.5),
        ]
        spins0 = np.stack([state.to_cartesian() for state in starts])
        np.testing.assert_array_equal(island_mask(spins0, attractor), [True, True, False, False])

    def test_without_screen_the_draw_is_uniform(self, attractor):
        region = RegionSpec(n_members=12)
        np.testing.assert_array_equal(draw_members(region, attractor, seed=3), sample_region(region, seed=3))

    def test_screened_members_lie_in_the_chaotic_region(self, attractor):
        region = RegionSpec(n_members=8, exclude_islands=True)
        members = draw_members(region, attractor, seed=4)
        assert members.shape == (8, 4)
        assert not np.any(island_mask(canonical_to_cartesian(members), attractor))
        np.testing.assert_array_equal(members, draw_members(region, attractor, seed=4))

    def test_fully_trapped_region_is_empty(self, attractor, monkeypatch):
        monkeypatch.setattr(integrate, "island_mask", lambda spins0, params: np.ones(len(spins0), dtype=bool))
        with pytest.raises(EmptyRegionError):
            draw_members(RegionSpec(n_members=4, exclude_islands=True), attractor, seed=0)


class TestDecorrelator:
    def test_initial_value(self, oscillatory):
        series = decorrelator(RegionSpec(n_members=6), oscillatory, [0.0, 0.1], epsilon=1e-3, seed=2)
        assert series.D1[0] == pytest.approx(1.0 - math.cos(1e-3), rel=1e-8)
        assert series.D2[0] == pytest.approx(1.0 - math.cos(1e-3), rel=1e-8)
        assert series.ensemble_size == 6

    def test_identical_copies_do_not_decorrelate(self):
        spins = canonical_to_cartesian(np.array([[0.1, 0.2, -0.3, 1.0]]))
        np.testing.assert_allclose(pair_decorrelation(spins, spins), 0.0)

    def test_epsilon_must_be_positive(self, oscillatory):
        with pytest.raises(DomainError):
            decorrelator(RegionSpec(n_members=2), oscillatory, [0.0, 1.0], epsilon=0.0)

    @pytest.mark.slow
    def test_transient_chaos_decays(self, attractor):
        times = np.linspace(0.0, 200.0, 401)
        series = decorrelator(RegionSpec(n_members=20, exclude_islands=True), attractor, times, seed=11)
        assert series.mean.max() > 1e3 * series.mean[0]
        assert series.mean[-1] < 1e-3

    @pytest.mark.slow
    def test_closed_system_saturates(self):
        times = np.linspace(0.0, 200.0, 401)
        series = decorrelator(RegionSpec(n_members=20), ModelParams(V=1.7, gamma=0.0), times, seed=11)
        assert series.mean[-100:].mean() > 0.1
        assert growth_rate(series.mean, times).rate > 0.0


class TestLyapunov:
    def test_rejects_short_runs(self, oscillatory):
        with pytest.raises(DomainError):
            lyapunov_exponent(RegionSpec(n_members=2), oscillatory, total_time=5.0, renormalization_interval=1.0)
        with pytest.raises(DomainError):
            lyapunov_exponent(RegionSpec(n_members=2), oscillatory, total_time=40.0, transient_discard=50.0)

    def test_reproducible(self, chaotic):
        region = RegionSpec(n_members=4)
        first = lyapunov_exponent(region, chaotic, total_time=60.0, transient_discard=10.0, seed=4)
        second = lyapunov_exponent(region, chaotic, total_time=60.0, transient_discard=10.0, seed=4)
        assert first.exponents == second.exponents
        assert len(first.exponents) + first.n_escaped == 4

    @pytest.mark.slow
    def test_regimes(self, oscillatory, attractor, chaotic):
        region = RegionSpec(n_members=8)
        regular = lyapunov_exponent(region, oscillatory, total_time=2000.0, seed=1)
        dissipative = lyapunov_exponent(region, attractor, total_time=2000.0, seed=1)
        steady = lyapunov_exponent(region, chaotic, total_time=2000.0, seed=1)
        assert abs(regular.Lambda_l) < 0.01
        assert dissipative.Lambda_l < 0.0
        assert steady.Lambda_l > 0.0


class TestInvariants:
    def test_conserved_value(self):
        assert conserved_R(0.0, 0.0, ModelParams(V=0.5, gamma=0.2)) == pytest.approx(-1.56235, abs=1e-5)

    def test_domain(self, oscillatory):
        with pytest.raises(DomainError):
            conserved_R(1.0, 0.0, oscillatory)

    def test_singular_argument(self):
        with pytest.raises(SingularInputError):
            conserved_R(0.0, math.pi, ModelParams(V=1.0, gamma=0.0))

    def test_conserved_along_symmetric_orbit(self, oscillatory):
        trajectory = evolve_symmetric(0.2, 0.0, oscillatory, np.linspace(0.0, 200.0, 2001), tol=1e-12)
        canonical = trajectory.canonical
        series = conserved_R_series(canonical[:, 0], canonical[:, 1], oscillatory)
        assert np.max(np.abs(series - series[0])) < 1e-6 * abs(series[0])

    def test_branch_is_tracked_continuously(self, attractor):
        # at z = 0.5 the logarithm argument winds around the origin once per turn of phi
        phi = np.linspace(0.0, 6.0 * math.pi, 6001)
        series = conserved_R_series(np.full_like(phi, 0.5), phi, attractor)
        assert np.max(np.abs(np.diff(series))) < 0.5

    def test_current_at_fixed_points(self, oscillatory, attractor):
        np.testing.assert_allclose(atomic_current(_fixed_point(oscillatory, Family.FP_I), oscillatory), 0.2, atol=1e-12)
        np.testing.assert_allclose(atomic_current(ClassicalState.symmetric(0.4, 0.0), oscillatory), 0.0, atol=1e-15)
        fp3 = _fixed_point(attractor, Family.FP_III, branch=-1)
        np.testing.assert_allclose(atomic_current(fp3, attractor), 0.068259, atol=1e-6)

    def test_time_averaged_current_of_a_fixed_point(self, oscillatory):
        trajectory = evolve_classical(_fixed_point(oscillatory, Family.FP_I), oscillatory, np.linspace(0.0, 20.0, 41))
        np.testing.assert_allclose(time_averaged_current(trajectory, oscillatory), 0.2, atol=1e-8)
        with pytest.raises(DomainError):
            time_averaged_current(trajectory, oscillatory, t_min=30.0)

    def test_participation_ratio(self):
        assert participation_ratio(np.ones((5, 5))) == pytest.approx(25.0)
        assert participation_ratio(np.eye(1)) == pytest.approx(1.0)
        with pytest.raises(DomainError):
            participation_ratio(np.zeros(4))


class TestPhaseSpaceDensity:
    def test_delta_ensemble_at_attractor(self, attractor):
        point = _fixed_point(attractor, Family.FP_III, branch=-1).as_array()
        histogram = phase_space_density(np.repeat(point[None], 5, axis=0), attractor, t_snapshot=20.0)
        assert histogram.occupied_cells == 1
        assert histogram.density.sum() == pytest.approx(1.0)

    def test_initial_snapshot_spreads_over_region(self, attractor):
        histogram = phase_space_density(RegionSpec(n_members=400), attractor, t_snapshot=0.0, grid=(10, 10))
        assert histogram.occupied_cells > 20

    @pytest.mark.slow
    def test_attractor_collapses_and_chaos_spreads(self, attractor, chaotic):
        region = RegionSpec(n_members=200)
        collapsed = phase_space_density(region, attractor, t_snapshot=500.0, seed=3)
        spread = phase_space_density(region, chaotic, t_snapshot=500.0, seed=3)
        assert collapsed.occupied_cells <= 4
        assert participation_ratio(spread.density) > 20
