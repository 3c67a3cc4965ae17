"""Acceptance suite: each criterion measures one published property at desk scale."""

from __future__ import annotations

import math
import time
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from rich.console import Console
from rich.table import Table
from scipy.optimize import brentq

from classical import (
    RegionSpec,
    conserved_R_series,
    decorrelator,
    draw_members,
    evolve_classical,
    evolve_ensemble,
    evolve_symmetric,
    growth_rate,
    time_averaged_current,
)
from errors import DomainError, JunctionSimError
from harness.constants import CriterionStatus
from harness.harness_types import CriterionResult
from harness.presets import PRESET_SEED
from hilbert import lindblad_evolve, product_coherent_state
from model import (
    ClassicalState,
    Family,
    ModelParams,
    analytic_fixed_points,
    canonical_to_cartesian,
    oscillation_frequencies,
)
from observables import fourier_spectrum, husimi_q, purity, von_neumann_entropy
from spectra import (
    analyze_spectrum,
    complex_spacing_ratios,
    ginibre_spectrum,
    ks_distance_poisson,
    poisson_cloud,
    sector_spectra,
    unfold_spacings,
)
from trajectories import TrajectoryConfig, ensemble_evolve
from twa import average_fluctuation, twa_decorrelator
from utils.logger import LoggerFactory

logger = LoggerFactory.get_logger(name="HARNESS")

VERIFY_SEED = PRESET_SEED
FULL_ONLY = "full only"

Outcome = Tuple[str, str, bool]


class Criterion(NamedTuple):
    number: int
    name: str
    full_only: bool
    check: Callable[[bool], Outcome]


def _fixed_point(params: ModelParams, family: Family, branch: int = 0):
    for point in analytic_fixed_points(params):
        if point.family is family and point.branch == branch:
            return point
    raise JunctionSimError(f"{family.value} (branch {branch}) missing at V={params.V}, gamma={params.gamma}")


def _soft_mode(params: ModelParams) -> float:
    """Largest ``Re λ²`` over the FP-I Jacobian eigenvalues.

    Equals ``-ω₋²`` while FP-I is stable and turns positive past the transition.
    """
    eigenvalues = np.asarray(_fixed_point(params, Family.FP_I).eigenvalues)
    return float(np.max((eigenvalues**2).real))


def critical_coupling_check(quick: bool) -> Outcome:
    worst_root = 0.0
    for gamma in (0.1, 0.2, 0.5):
        root = brentq(lambda V: _soft_mode(ModelParams(V=V, gamma=gamma)), 0.05, 2.0, xtol=1e-13)
        worst_root = max(worst_root, abs(root - math.sqrt(1.0 - gamma**2)))
    worst_formula = 0.0
    for gamma in np.linspace(0.0, 0.8, 9):
        V_c = math.sqrt(1.0 - gamma**2)
        for fraction in np.linspace(0.1, 0.9, 9):
            params = ModelParams(V=fraction * V_c, gamma=float(gamma))
            measured = math.sqrt(max(-_soft_mode(params), 0.0))
            worst_formula = max(worst_formula, abs(measured - oscillation_frequencies(params).omega_minus))
    return (
        f"|V*-V_c|={worst_root:.2e}, |ω₋-Eq|={worst_formula:.2e}",
        "≤ 1e-6, ≤ 1e-8",
        worst_root <= 1e-6 and worst_formula <= 1e-8,
    )


def _dominant_peak(series: NDArray, times: NDArray) -> Tuple[float, float]:
    spectrum = fourier_spectrum(series, times)
    if not spectrum.peaks:
        raise DomainError("spectrum has no interior maximum")
    return spectrum.peaks[0], spectrum.resolution


def frequency_check(quick: bool) -> Outcome:
    """Small orbits around FP-I: the in-phase mode ``z₊`` rings at ω₋, the out-of-phase mode ``z₋`` at ω₊."""
    params = ModelParams(V=0.5, gamma=0.2)
    times = np.arange(0.0, 400.0 + 1e-9, 0.05)
    center = _fixed_point(params, Family.FP_I).location
    in_phase, resolution = _dominant_peak(evolve_symmetric(0.05, center.phi1, params, times).z_plus, times)
    start = ClassicalState(z1=0.03, phi1=center.phi1, z2=-0.03, phi2=center.phi2)
    out_of_phase, _ = _dominant_peak(evolve_classical(start, params, times).z_minus, times)
    formula = oscillation_frequencies(params)
    passed = (
        abs(out_of_phase - 1.204116) <= resolution
        and abs(in_phase - 0.685640) <= resolution
        and abs(formula.omega_plus - 1.204116) <= 1e-6
    )
    return (
        f"z₋ peak={out_of_phase:.6f}, z₊ peak={in_phase:.6f}, ω₊={formula.omega_plus:.6f}",
        f"1.204116, 0.685640 (± {resolution:.4f})",
        passed,
    )


def conserved_quantity_check(quick: bool) -> Outcome:
    params = ModelParams(V=0.5, gamma=0.2)
    times = np.arange(0.0, 200.0 + 1e-9, 0.1)
    worst = 0.0
    for z_plus, phi_plus in ((0.3, 0.0), (-0.2, 1.0), (0.5, -2.0), (0.05, 2.5)):
        trajectory = evolve_symmetric(z_plus, phi_plus, params, times)
        R = conserved_R_series(trajectory.z_plus, trajectory.canonical[:, 1], params)
        worst = max(worst, float(np.max(np.abs(R - R[0])) / abs(R[0])))
    return f"max drift={worst:.2e}", "< 1e-6", worst < 1e-6


def attractor_check(quick: bool) -> Outcome:
    """Members of the chaotic region relax onto FP-III; the FP-IV islands are screened out first."""
    params = ModelParams(V=1.7, gamma=0.2)
    target = _fixed_point(params, Family.FP_III, branch=-1)
    closed_form = -math.sqrt(1.0 - params.J**2 / (params.V**2 + params.gamma**2))
    location_error = abs(target.location.z1 - closed_form)
    n_members = 20 if quick else 50
    region = RegionSpec(z_min=-0.95, z_max=0.95, n_members=n_members, exclude_islands=True)
    members = canonical_to_cartesian(draw_members(region, params, VERIFY_SEED))
    final = evolve_ensemble(members, params, [0.0, 250.0, 500.0])[-1]
    distance = float(np.max(np.linalg.norm(final - target.location.to_cartesian(), axis=-1)))
    passed = (
        members.shape[0] == n_members
        and distance < 1e-4
        and location_error <= 1e-10
        and abs(closed_form + 0.811606) < 1e-6
    )
    return (
        f"max ‖x-FP-III‖={distance:.2e} over {members.shape[0]} chaotic-region members, z*={target.location.z1:.6f}",
        "< 1e-4, z*=-0.811606",
        passed,
    )


def transient_chaos_check(quick: bool) -> Outcome:
    region = RegionSpec(z_min=-0.9, z_max=0.9, n_members=16 if quick else 50, exclude_islands=True)
    times = np.arange(0.0, 200.0 + 1e-9, 0.5)
    dissipative = decorrelator(region, ModelParams(V=1.7, gamma=0.2), times, seed=VERIFY_SEED)
    rate = growth_rate(dissipative.mean, times, label="decorrelator").rate
    final = float(dissipative.mean[-1])
    closed = decorrelator(region, ModelParams(V=1.7, gamma=0.0), times, seed=VERIFY_SEED)
    plateau = float(np.mean(closed.mean[times >= 150.0]))
    passed = rate > 0.2 and final < 1e-3 and plateau > 0.1
    return (
        f"rate={rate:.3f}, D(200)={final:.1e}, D̄(γ=0)={plateau:.2f}",
        "> 0.2, < 1e-3, O(1)",
        passed,
    )


def _trace_distance(a: NDArray, b: NDArray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def unraveling_check(quick: bool) -> Outcome:
    params = ModelParams(V=0.5, gamma=0.2, S=2)
    times = np.arange(0.0, 10.0 + 1e-9, 0.5)
    psi0 = product_coherent_state(ClassicalState(z1=0.3, phi1=0.0, z2=-0.2, phi2=0.4), params.S)
    oracle = lindblad_evolve(psi0, params, times).rhos
    n_traj = 1000 if quick else 4000
    bound = 0.05 * math.sqrt(4000 / n_traj)
    distances = []
    for size in (n_traj, 4 * n_traj):
        config = TrajectoryConfig(dt=0.01, n_traj=size, seed=VERIFY_SEED)
        rho = ensemble_evolve(psi0, params, config, times).rho
        distances.append(max(_trace_distance(rho[index], oracle[index]) for index in range(times.size)))
    passed = distances[0] <= bound and distances[1] <= bound / 1.3
    return (
        f"n={n_traj}: {distances[0]:.3f}, n={4 * n_traj}: {distances[1]:.3f}",
        f"≤ {bound:.3f}, ≤ {bound / 1.3:.3f}",
        passed,
    )


def _reduced_run(omega_z: float, n_traj: int) -> Tuple[NDArray, NDArray]:
    params = ModelParams(V=1.7, gamma=0.2, omega_z=omega_z, S=10)
    times = np.arange(0.0, 200.0 + 1e-9, 0.5)
    psi0 = product_coherent_state(ClassicalState(z1=0.6, phi1=0.0, z2=-0.2, phi2=0.5), params.S)
    config = TrajectoryConfig(dt=2e-3, n_traj=n_traj, seed=VERIFY_SEED)
    result = ensemble_evolve(psi0, params, config, times, keep_rho=False, keep_reduced=True)
    return times, result.reduced[0]


def coherence_recovery_check(quick: bool) -> Outcome:
    times, rho1 = _reduced_run(0.0, 500)
    entropy = von_neumann_entropy(rho1)
    scale = math.log(21.0)
    peak = float(np.max(entropy[times < 20.0]))
    final_entropy, final_purity = float(entropy[-1]), float(purity(rho1[-1]))
    passed = peak > 0.5 * scale and final_entropy < 0.25 * scale and final_purity > 0.6
    return (
        f"max S(t<20)={peak / scale:.2f} ln21, S(200)={final_entropy / scale:.2f} ln21, P(200)={final_purity:.2f}",
        "> 0.5 ln21, < 0.25 ln21, > 0.6",
        passed,
    )


def steady_chaos_check(quick: bool) -> Outcome:
    times, rho1 = _reduced_run(0.5, 500)
    late = times >= 100.0
    scale = math.log(21.0)
    entropy = float(np.min(von_neumann_entropy(rho1[late])))
    highest_purity = float(np.max(purity(rho1[late])))
    ratio = husimi_q(rho1[-1], 10.0).participation_ratio()
    passed = entropy > 0.6 * scale and highest_purity < 0.3 and ratio > 20.0
    return (
        f"min S={entropy / scale:.2f} ln21, max P={highest_purity:.2f}, PR={ratio:.1f}",
        "> 0.6 ln21, < 0.3, > 20",
        passed,
    )


def liouvillian_check(quick: bool) -> Outcome:
    anisotropy = {}
    for label, V, omega_z in (("oscillatory", 0.5, 0.0), ("transient", 1.7, 0.0), ("steady", 1.7, 0.5)):
        params = ModelParams(V=V, gamma=0.2, omega_z=omega_z, S=5)
        eigenvalues = sector_spectra(params, sectors=(1,))[1]
        anisotropy[label] = -analyze_spectrum(eigenvalues, sector=1).mean_cos_theta
    passed = (
        anisotropy["oscillatory"] <= 0.08
        and 0.16 <= anisotropy["transient"] <= 0.30
        and 0.16 <= anisotropy["steady"] <= 0.30
    )
    measured = ", ".join(f"{label}={value:.3f}" for label, value in anisotropy.items())
    return measured, "≤ 0.08, [0.16, 0.30], [0.16, 0.30]", passed


def random_matrix_check(quick: bool) -> Outcome:
    samples, size = (4, 1000) if quick else (10, 2000)
    ginibre = [complex_spacing_ratios(ginibre_spectrum(size, VERIFY_SEED + index)).ratios for index in range(samples)]
    clouds = [poisson_cloud(size, VERIFY_SEED + index) for index in range(samples)]
    ginibre_cos = -float(np.mean(np.cos(np.angle(np.concatenate(ginibre)))))
    poisson_cos = -float(np.mean(np.cos(np.angle(np.concatenate([complex_spacing_ratios(c).ratios for c in clouds])))))
    ks = ks_distance_poisson(np.concatenate([unfold_spacings(cloud) for cloud in clouds]))
    passed = abs(ginibre_cos - 0.24) <= 0.02 and abs(poisson_cos) <= 0.02 and ks < 0.03
    return (
        f"Ginibre={ginibre_cos:.3f}, Poisson={poisson_cos:.3f}, KS={ks:.3f}",
        "0.24 ± 0.02, 0 ± 0.02, < 0.03",
        passed,
    )


def twa_crossover_check(quick: bool) -> Outcome:
    times = np.arange(0.0, 40.0 + 1e-9, 0.2)
    region = RegionSpec(z_min=-0.8, z_max=0.8, n_members=8, symmetric=True)
    failures: List[str] = []
    for V in (0.2, 0.4, 0.6, 0.8, 1.0, 1.1, 1.3, 1.5, 1.7, 2.0):
        params = ModelParams(V=V, gamma=0.2, S=1000)
        fluctuation = average_fluctuation(params, times, n_samples=200, seed=VERIFY_SEED, region=region).rate
        decorrelation = twa_decorrelator(params, times, region, seed=VERIFY_SEED).rate
        rates = [math.nan if rate is None else rate for rate in (fluctuation, decorrelation)]
        if V <= 0.8 and not all(rate < 0.05 for rate in rates):
            failures.append(f"V={V}: {rates[0]:.3f}/{rates[1]:.3f}")
        if V >= 1.3 and not all(rate > 0.2 for rate in rates):
            failures.append(f"V={V}: {rates[0]:.3f}/{rates[1]:.3f}")
    return "; ".join(failures) or "all points in range", "< 0.05 for V ≤ 0.8, > 0.2 for V ≥ 1.3", not failures


def steady_current_check(quick: bool) -> Outcome:
    """FP-I is integrated below V_c, where it is a center; past V_c it is a saddle of the symmetric class."""
    times = np.arange(0.0, 50.0 + 1e-9, 0.5)
    oscillatory, attractor = ModelParams(V=0.5, gamma=0.2), ModelParams(V=1.7, gamma=0.2)
    expected_iii = attractor.gamma * attractor.J**2 / (attractor.V**2 + attractor.gamma**2)
    errors = []
    for params, family, branch, expected in (
        (oscillatory, Family.FP_I, 0, oscillatory.gamma),
        (attractor, Family.FP_III, -1, expected_iii),
    ):
        location = _fixed_point(params, family, branch).location
        current = time_averaged_current(evolve_classical(location, params, times), params)
        errors.append(float(np.max(np.abs(current - expected))))
    passed = max(errors) <= 1e-8 and abs(expected_iii - 0.068259) < 1e-6
    return f"FP-I (V=0.5) err={errors[0]:.1e}, FP-III err={errors[1]:.1e}", "γ, 0.068259 (≤ 1e-8)", passed


CRITERIA: List[Criterion] = [
    Criterion(1, "Critical coupling", False, critical_coupling_check),
    Criterion(2, "Synchronized frequency", False, frequency_check),
    Criterion(3, "Conserved quantity", False, conserved_quantity_check),
    Criterion(4, "Dissipative attractor", False, attractor_check),
    Criterion(5, "Transient chaos", False, transient_chaos_check),
    Criterion(6, "Unraveling exactness", False, unraveling_check),
    Criterion(7, "Coherence recovery", True, coherence_recovery_check),
    Criterion(8, "Steady-state chaos", True, steady_chaos_check),
    Criterion(9, "Liouvillian statistics", True, liouvillian_check),
    Criterion(10, "Random-matrix oracles", False, random_matrix_check),
    Criterion(11, "TWA crossover", True, twa_crossover_check),
    Criterion(12, "Steady current", False, steady_current_check),
]


def evaluate(criterion: Criterion, quick: bool) -> CriterionResult:
    label = f"{criterion.number}. {criterion.name}"
    if quick and criterion.full_only:
        return CriterionResult(name=label, measured="-", expected="-", status=CriterionStatus.SKIPPED, detail=FULL_ONLY)
    started = time.perf_counter()
    try:
        measured, expected, passed = criterion.check(quick)
    except (JunctionSimError, ValueError, ArithmeticError) as error:
        logger.error(f"{label} raised: {error}")
        return CriterionResult(
            name=label,
            measured="error",
            expected="-",
            status=CriterionStatus.FAILED,
            seconds=time.perf_counter() - started,
            detail=f"{type(error).__name__}: {error}",
        )
    status = CriterionStatus.PASSED if passed else CriterionStatus.FAILED
    logger.info(f"{label}: {status.value} ({measured})")
    return CriterionResult(
        name=label, measured=measured, expected=expected, status=status, seconds=time.perf_counter() - started
    )


def run_criteria(quick: bool = True, only: Optional[Sequence[int]] = None) -> List[CriterionResult]:
    """Evaluates the acceptance suite; ``only`` restricts it to the given criterion numbers."""
    selected = [criterion for criterion in CRITERIA if only is None or criterion.number in only]
    return [evaluate(criterion, quick) for criterion in selected]


def all_passed(results: Sequence[CriterionResult]) -> bool:
    return all(result.status is not CriterionStatus.FAILED for result in results)


_STYLES = {CriterionStatus.PASSED: "green", CriterionStatus.FAILED: "bold red", CriterionStatus.SKIPPED: "yellow"}


def render(results: Sequence[CriterionResult], console: Console) -> None:
    table = Table(title="Acceptance criteria")
    table.add_column("Criterion")
    table.add_column("Measured")
    table.add_column("Expected")
    table.add_column("Status")
    table.add_column("Time [s]", justify="right")
    for result in results:
        status = result.status.value + (f" ({result.detail})" if result.detail else "")
        table.add_row(
            result.name,
            result.measured,
            result.expected,
            f"[{_STYLES[result.status]}]{status}[/]",
            f"{result.seconds:.1f}",
        )
    console.print(table)
