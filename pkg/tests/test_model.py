from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError

from errors import BracketError, DomainError, PoleError
from model import (
    ClassicalState,
    Family,
    ModelParams,
    Stability,
    analytic_fixed_points,
    bifurcation_diagram,
    canonical_rhs,
    canonical_to_cartesian,
    cartesian_drift,
    cartesian_jacobian,
    cartesian_to_canonical,
    critical_coupling,
    energy,
    equations_of_motion,
    find_numeric_fixed_points,
    fixed_points,
    fp4_max_real,
    fp4_stability_boundary,
    jacobian,
    linear_stability,
    numerical_jacobian,
    oscillation_frequencies,
    phase_diagram,
    refine_fixed_point,
    wrap_phase,
)


def _family(params: ModelParams, family: Family, branch: int = 0):
    return next(fp for fp in fixed_points(params) if fp.family == family and fp.branch == branch)


def _phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    diff = a - b
    diff[[1, 3]] = (diff[[1, 3]] + math.pi) % (2.0 * math.pi) - math.pi
    return float(np.max(np.abs(diff)))


class TestParams:
    def test_half_integer_spin(self):
        assert ModelParams(S=2.5).dim == 6
        with pytest.raises(ValidationError):
            ModelParams(S=2.3)

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValidationError):
            ModelParams(gamma=-0.1)

    def test_with_updates_keeps_other_fields(self):
        params = ModelParams(V=1.7, gamma=0.2, S=5).with_updates(omega_z=0.5)
        assert (params.V, params.gamma, params.S, params.omega_z) == (1.7, 0.2, 5.0, 0.5)

    def test_phases_are_wrapped(self):
        state = ClassicalState(z1=0.1, phi1=1.5 * math.pi, z2=0.0, phi2=-math.pi)
        assert state.phi1 == pytest.approx(-0.5 * math.pi)
        assert state.phi2 == pytest.approx(math.pi)
        assert wrap_phase(3.342950) == pytest.approx(3.342950 - 2.0 * math.pi)

    def test_chart_conversion(self):
        x = np.array([0.3, 2.0, -0.6, -1.0])
        spins = canonical_to_cartesian(x)
        assert np.linalg.norm(spins[:3]) == pytest.approx(1.0)
        assert spins[2] == pytest.approx(0.3)
        np.testing.assert_allclose(cartesian_to_canonical(spins), x, atol=1e-12)


class TestCriticalCoupling:
    def test_closed_system(self):
        assert critical_coupling(ModelParams(gamma=0.0)) == pytest.approx(1.0)

    def test_dissipative(self):
        assert critical_coupling(ModelParams(gamma=0.2)) == pytest.approx(0.979796, abs=1e-6)

    def test_no_oscillatory_phase(self):
        with pytest.raises(DomainError):
            critical_coupling(ModelParams(gamma=1.0))

    def test_soft_mode_vanishes_at_threshold(self):
        V_c = critical_coupling(ModelParams(gamma=0.2))
        frequencies = oscillation_frequencies(ModelParams(gamma=0.2, V=V_c))
        assert frequencies.omega_minus == pytest.approx(0.0, abs=1e-7)


class TestFrequencies:
    def test_degenerate_without_coupling(self):
        frequencies = oscillation_frequencies(ModelParams(gamma=0.0, V=0.0))
        assert (frequencies.omega_plus, frequencies.omega_minus) == pytest.approx((1.0, 1.0))

    def test_oscillatory_phase(self):
        frequencies = oscillation_frequencies(ModelParams(gamma=0.2, V=0.5))
        assert frequencies.omega_plus == pytest.approx(1.204116, abs=2e-6)
        assert frequencies.omega_minus == pytest.approx(0.685640, abs=2e-6)
        assert not frequencies.unstable

    def test_growth_rate_above_threshold(self):
        frequencies = oscillation_frequencies(ModelParams(gamma=0.2, V=1.2))
        assert frequencies.unstable
        assert frequencies.omega_minus == 0.0
        root = math.sqrt(0.96)
        assert frequencies.growth_rate == pytest.approx(math.sqrt(root * (1.2 - root)))


class TestDynamics:
    def test_derivative_at_equator(self):
        rhs = equations_of_motion(ClassicalState.symmetric(0.0, 0.0), ModelParams(gamma=0.2))
        np.testing.assert_allclose(rhs, [-0.2, 0.0, -0.2, 0.0], atol=1e-15)

    def test_pole_is_rejected(self):
        with pytest.raises(PoleError):
            equations_of_motion(ClassicalState(z1=1.0, phi1=0.0, z2=0.0, phi2=0.0), ModelParams())
        with pytest.raises(PoleError):
            jacobian(np.array([0.0, 0.0, -1.0, 0.0]), ModelParams())

    def test_analytic_jacobian_matches_finite_differences(self, chaotic):
        x = np.array([0.3, 0.7, -0.4, 2.1])
        expected = numerical_jacobian(lambda y: canonical_rhs(y, chaotic), x)
        np.testing.assert_allclose(jacobian(x, chaotic), expected, atol=1e-6)

    def test_cartesian_jacobian_matches_finite_differences(self, chaotic):
        s = canonical_to_cartesian(np.array([0.3, 0.7, -0.4, 2.1]))
        expected = numerical_jacobian(lambda y: cartesian_drift(y, chaotic), s)
        np.testing.assert_allclose(cartesian_jacobian(s, chaotic), expected, atol=1e-6)

    def test_energy_of_untilted_state(self):
        spins = ClassicalState.symmetric(0.0, 0.0).to_cartesian()
        assert float(energy(spins, ModelParams(V=1.0))) == pytest.approx(-2.0)


class TestFixedPoints:
    def test_symmetric_families(self, oscillatory):
        fp1 = _family(oscillatory, Family.FP_I)
        fp2 = _family(oscillatory, Family.FP_II)
        assert fp1.location.z1 == pytest.approx(0.0, abs=1e-12)
        assert fp1.location.phi1 == pytest.approx(wrap_phase(3.342950), abs=1e-6)
        assert fp2.location.phi1 == pytest.approx(-0.201358, abs=1e-6)
        assert fp1.residual < 1e-12
        assert not any(fp.family in (Family.FP_III, Family.FP_IV) for fp in fixed_points(oscillatory))

    def test_self_trapped_attractor(self, attractor):
        fp3 = _family(attractor, Family.FP_III, branch=-1)
        assert fp3.location.z1 == pytest.approx(-0.811606, abs=1e-6)
        assert fp3.location.z2 == pytest.approx(fp3.location.z1)
        assert fp3.location.phi1 == pytest.approx(wrap_phase(3.258702), abs=1e-6)
        assert fp3.classification == Stability.ATTRACTOR
        assert all(ev.real < 0.0 for ev in fp3.eigenvalues)

    def test_pitchfork_pair_of_closed_system(self):
        branches = [fp for fp in fixed_points(ModelParams(V=2.0)) if fp.family == Family.FP_III]
        assert sorted(fp.location.z1 for fp in branches) == pytest.approx([-0.866025, 0.866025], abs=1e-6)

    def test_antisymmetric_family_mirrors(self, attractor):
        fp4 = _family(attractor, Family.FP_IV, branch=1)
        assert fp4.location.z2 == pytest.approx(-fp4.location.z1)

    def test_no_symmetric_families_beyond_unit_dissipation(self):
        families = {fp.family for fp in analytic_fixed_points(ModelParams(gamma=1.2, V=0.5))}
        assert Family.FP_I not in families
        assert Family.FP_III in families

    def test_tilted_search_converges(self):
        params = ModelParams(V=1.7, gamma=0.2, omega_z=0.5)
        search = find_numeric_fixed_points(params, lattice=6, max_iter=60)
        assert search.points
        assert all(fp.family == Family.NUMERIC and fp.residual <= 1e-10 for fp in search.points)
        assert len(search.points) + len(search.failures) <= 6**3

    def test_untilted_search_finds_closed_forms(self, attractor):
        analytic = [fp.location.as_array() for fp in analytic_fixed_points(attractor)]
        search = find_numeric_fixed_points(attractor, lattice=8, max_iter=60)
        assert any(_phase_distance(fp.location.as_array(), y) < 1e-6 for fp in search.points for y in analytic)

    @pytest.mark.parametrize("V", [0.5, 1.7])
    def test_set_is_exchange_invariant(self, V):
        params = ModelParams(V=V, gamma=0.2)
        points = fixed_points(params)
        for fp in points:
            swapped = fp.location.as_array()[[2, 3, 0, 1]]
            partners = [other for other in points if _phase_distance(other.location.as_array(), swapped) < 1e-12]
            assert len(partners) == 1
            assert partners[0].classification == fp.classification

    @pytest.mark.slow
    def test_tilted_set_is_exchange_invariant(self, chaotic):
        points = fixed_points(chaotic)
        assert points
        for fp in points:
            swapped = fp.location.as_array()[[2, 3, 0, 1]]
            assert any(_phase_distance(other.location.as_array(), swapped) < 1e-6 for other in points)

    @pytest.mark.parametrize("V", [0.5, 1.7])
    def test_classification_survives_a_perturbed_seed(self, V):
        params = ModelParams(V=V, gamma=0.2)
        rng = np.random.default_rng(7)
        for fp in fixed_points(params):
            kick = rng.standard_normal(4)
            seed = ClassicalState.from_array(fp.location.as_array() + 1e-8 * kick / np.linalg.norm(kick))
            refined = refine_fixed_point(seed, params, family=fp.family)
            assert refined.classification == fp.classification
            assert _phase_distance(refined.location.as_array(), fp.location.as_array()) < 1e-9

    def test_refinement_needs_a_nearby_root(self, attractor):
        with pytest.raises(DomainError):
            refine_fixed_point(ClassicalState.symmetric(0.3, 0.5), attractor, max_iter=1)


class TestLinearStability:
    def test_center_frequencies(self, oscillatory):
        result = linear_stability(_family(oscillatory, Family.FP_I).location, oscillatory)
        assert result.classification == Stability.CENTER
        magnitudes = sorted(abs(ev.imag) for ev in result.eigenvalues)
        assert magnitudes == pytest.approx([0.685640, 0.685640, 1.204116, 1.204116], abs=1e-5)
        assert max(abs(ev.real) for ev in result.eigenvalues) < 1e-8

    @pytest.mark.parametrize("gamma", [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    @pytest.mark.parametrize("family", [Family.FP_I, Family.FP_II])
    def test_closed_form_frequencies_match_the_jacobian(self, gamma, family):
        V_c = critical_coupling(ModelParams(gamma=gamma))
        for fraction in np.linspace(0.1, 0.9, 9):
            params = ModelParams(V=fraction * V_c, gamma=gamma)
            frequencies = oscillation_frequencies(params)
            result = linear_stability(_family(params, family).location, params)
            magnitudes = sorted(abs(ev.imag) for ev in result.eigenvalues)
            expected = [frequencies.omega_minus] * 2 + [frequencies.omega_plus] * 2
            np.testing.assert_allclose(magnitudes, expected, rtol=0.0, atol=1e-8)

    def test_unstable_above_threshold(self):
        params = ModelParams(V=1.2, gamma=0.2)
        result = linear_stability(_family(params, Family.FP_I).location, params)
        assert result.classification == Stability.UNSTABLE
        leading = result.eigenvalues[0]
        assert leading.real > 0.0
        assert abs(leading.imag) < 1e-8

    def test_pole_error(self):
        with pytest.raises(PoleError):
            linear_stability(ClassicalState(z1=1.0, phi1=0.0, z2=0.5, phi2=0.0), ModelParams())


class TestStabilityBoundary:
    def test_fp4_is_a_center_just_above_threshold(self):
        assert fp4_max_real(1.05, 0.2) < 1e-8

    def test_crossing_exists_with_dissipation(self):
        V_tilde = fp4_stability_boundary(0.2)
        assert V_tilde > critical_coupling(ModelParams(gamma=0.2))
        assert fp4_max_real(V_tilde - 1e-3, 0.2) <= 1e-8
        assert fp4_max_real(V_tilde + 1e-3, 0.2) > 1e-8

    def test_closed_system_has_no_crossing(self):
        with pytest.raises(BracketError) as info:
            fp4_stability_boundary(0.0, n_scan=50)
        assert len(info.value.scanned) == 50

    def test_phase_diagram_rows(self):
        rows = phase_diagram([0.0, 0.2])
        assert rows[0].V_tilde_c is None
        assert rows[1].V_c == pytest.approx(0.979796, abs=1e-6)
        assert rows[1].V_tilde_c is not None

    def test_bifurcation_diagram_branches(self):
        rows = bifurcation_diagram(0.2, [0.5, 1.7])
        below = [row for row in rows if row.V == 0.5]
        above = [row for row in rows if row.V == 1.7]
        assert {row.family for row in below} == {Family.FP_I, Family.FP_II}
        assert Family.FP_III in {row.family for row in above}
