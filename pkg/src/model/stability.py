from __future__ import annotations

import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field
from scipy.linalg import eigvals
from scipy.optimize import brentq

from errors import BracketError, DomainError
from model.constants import (
    BOUNDARY_SCAN_POINTS,
    BOUNDARY_V_MAX,
    BOUNDARY_XTOL,
    NEWTON_DEDUP_RADIUS,
    NEWTON_LATTICE,
    NEWTON_MAX_ITER,
    RESIDUAL_TOL,
    STABILITY_TOL,
    Family,
    Stability,
)
from model.dynamics import canonical_rhs, jacobian
from model.model_types import (
    BifurcationBranch,
    ClassicalState,
    FixedPoint,
    Frequencies,
    ModelParams,
    PhaseBoundary,
    RootSearchFailure,
    StabilityResult,
    wrap_phase_array,
)
from utils.logger import LoggerFactory

logger = LoggerFactory.get_logger(name="MODEL_CORE")


class RootSearch(BaseModel):
    points: List[FixedPoint] = Field(description="Distinct converged fixed points.")
    failures: List[RootSearchFailure] = Field(description="Starting points whose iteration did not converge.")


def critical_coupling(params: ModelParams) -> float:
    """Coupling ``V_c = sqrt(J² - γ²)`` at which the soft mode ω- vanishes.

    Raises:
        DomainError: If ``gamma >= J``; the oscillatory phase does not exist there.
    """
    if params.gamma >= params.J:
        raise DomainError(f"no oscillatory phase for gamma={params.gamma} >= J={params.J}")
    return math.sqrt(params.J**2 - params.gamma**2)


def oscillation_frequencies(params: ModelParams) -> Frequencies:
    """Small-oscillation frequencies around FP-I / FP-II.

    ``ω± = (1/J) sqrt( sqrt(J² - γ²) [ sqrt(J² - γ²) ± V ] )``. Above ``V_c`` the
    soft mode turns into exponential growth; ω- is then reported as 0 and its
    rate is returned in ``growth_rate``.

    Args:
        params (ModelParams): Model couplings; ``V`` is taken as given (no absolute value).

    Returns:
        Frequencies: ω+ and ω- (or the growth rate flag).

    Raises:
        DomainError: If ``gamma >= J``.
    """
    root = critical_coupling(params)
    plus_sq = root * (root + params.V)
    minus_sq = root * (root - params.V)
    omega_plus = math.sqrt(max(plus_sq, 0.0)) / params.J
    if minus_sq >= 0.0:
        return Frequencies(omega_plus=omega_plus, omega_minus=math.sqrt(minus_sq) / params.J)
    return Frequencies(omega_plus=omega_plus, omega_minus=0.0, growth_rate=math.sqrt(-minus_sq) / params.J)


def classify(eigenvalues: Iterable[complex], tol: float = STABILITY_TOL) -> Stability:
    real = np.real(np.asarray(list(eigenvalues), dtype=complex))
    if np.any(real > tol):
        return Stability.UNSTABLE
    if np.all(real < -tol):
        return Stability.ATTRACTOR
    if np.all(np.abs(real) < tol):
        return Stability.CENTER
    return Stability.MARGINAL


def linear_stability(location: ClassicalState, params: ModelParams) -> StabilityResult:
    """Eigenvalues of the analytic 4x4 Jacobian at ``location`` and their class.

    Raises:
        PoleError: If the location sits at |z| -> 1.
    """
    jac = jacobian(location.as_array(), params)
    ev = eigvals(jac)
    ev = ev[np.lexsort((ev.imag, -ev.real))]
    tol = STABILITY_TOL * params.J
    return StabilityResult(eigenvalues=[complex(v) for v in ev], classification=classify(ev, tol))


def _make_fixed_point(family: Family, x: Sequence[float], params: ModelParams, branch: int = 0) -> FixedPoint:
    location = ClassicalState.from_array(np.asarray(x, dtype=float))
    stability = linear_stability(location, params)
    residual = float(np.max(np.abs(canonical_rhs(location.as_array(), params))))
    return FixedPoint(
        family=family,
        location=location,
        eigenvalues=stability.eigenvalues,
        classification=stability.classification,
        residual=residual,
        branch=branch,
    )


def self_trapped_imbalance(params: ModelParams) -> Optional[float]:
    """``z* = sqrt(1 - J²/(V² + γ²))`` of the self-trapped families, None when absent."""
    norm_sq = params.V**2 + params.gamma**2
    if norm_sq <= params.J**2:
        return None
    return math.sqrt(1.0 - params.J**2 / norm_sq)


def analytic_fixed_points(params: ModelParams) -> List[FixedPoint]:
    """Closed-form fixed points of the untilted flow."""
    J, V, gamma = params.J, params.V, params.gamma
    points: List[FixedPoint] = []

    if gamma <= J:
        root = math.sqrt(J**2 - gamma**2)
        phi_i = math.atan2(-gamma, -root)
        phi_ii = math.atan2(-gamma, root)
        points.append(_make_fixed_point(Family.FP_I, (0.0, phi_i, 0.0, phi_i), params))
        points.append(_make_fixed_point(Family.FP_II, (0.0, phi_ii, 0.0, phi_ii), params))
    else:
        logger.info(f"gamma={gamma} > J={J}: FP-I and FP-II do not exist")

    z_star = self_trapped_imbalance(params)
    if z_star is not None:
        phi_iii = math.atan2(-gamma, -V)
        phi_iv = math.atan2(-gamma, V)
        for sign in (-1, 1):
            z = sign * z_star
            points.append(_make_fixed_point(Family.FP_III, (z, phi_iii, z, phi_iii), params, branch=sign))
        for sign in (1, -1):
            z = sign * z_star
            points.append(_make_fixed_point(Family.FP_IV, (z, phi_iv, -z, phi_iv), params, branch=sign))
    return points


def _phase_distance(a: NDArray, b: NDArray) -> float:
    diff = a - b
    diff[[1, 3]] = wrap_phase_array(diff[[1, 3]])
    return float(np.max(np.abs(diff)))


def _damped_newton(seeds: NDArray, params: ModelParams, max_iter: int) -> Tuple[NDArray, NDArray]:
    """Runs the damped Newton iteration from each row of ``seeds``; returns the roots and their residuals."""
    x = np.array(seeds, dtype=float, copy=True)
    z_limit = 1.0 - 1e-6

    def residual_of(candidate: NDArray) -> Tuple[NDArray, NDArray]:
        values = canonical_rhs(candidate, params)
        return values, np.max(np.abs(values), axis=-1)

    values, res = residual_of(x)
    for _ in range(max_iter):
        active = res > 1e-14
        if not np.any(active):
            break
        jac = jacobian(x[active], params)
        step = -np.einsum("nij,nj->ni", np.linalg.pinv(jac), values[active])

        current = x[active]
        best = current.copy()
        best_res = res[active].copy()
        pending = np.ones(len(current), dtype=bool)
        alpha = 1.0
        for _ in range(12):
            trial = current + alpha * step
            trial[:, [0, 2]] = np.clip(trial[:, [0, 2]], -z_limit, z_limit)
            trial[:, [1, 3]] = wrap_phase_array(trial[:, [1, 3]])
            _, trial_res = residual_of(trial)
            accept = pending & (trial_res < best_res)
            best[accept] = trial[accept]
            best_res[accept] = trial_res[accept]
            pending &= ~accept
            if not np.any(pending):
                break
            alpha *= 0.5
        x[active] = best
        values, res = residual_of(x)
    return x, res


def refine_fixed_point(
    seed: ClassicalState,
    params: ModelParams,
    family: Family = Family.NUMERIC,
    max_iter: int = NEWTON_MAX_ITER,
) -> FixedPoint:
    """Polishes an approximate fixed point with the damped Newton iteration and classifies it.

    Raises:
        DomainError: If the iteration does not reach ``RESIDUAL_TOL``.
    """
    roots, res = _damped_newton(seed.as_array()[None, :], params, max_iter)
    if not np.isfinite(res[0]) or res[0] > RESIDUAL_TOL:
        raise DomainError(f"Newton refinement from {seed.as_array()} stalled at residual {res[0]:.3e}")
    branch = int(np.sign(roots[0, 0])) if family in (Family.FP_III, Family.FP_IV) else 0
    return _make_fixed_point(family, roots[0], params, branch=branch)


def find_numeric_fixed_points(
    params: ModelParams,
    lattice: int = NEWTON_LATTICE,
    max_iter: int = NEWTON_MAX_ITER,
) -> RootSearch:
    """Damped Newton search for fixed points of the (possibly tilted) flow.

    Starts from a ``lattice³`` grid over ``(z1, z2, φ)`` with ``φ1 = φ2 = φ`` and
    iterates in the full four-dimensional chart with step halving. Converged
    roots are deduplicated within ``NEWTON_DEDUP_RADIUS``.

    Args:
        params (ModelParams): Model couplings, tilt included.
        lattice (int): Points per lattice axis.
        max_iter (int): Newton iterations per start.

    Returns:
        RootSearch: Distinct fixed points plus one failure record per non-converged start.
    """
    z_axis = np.linspace(-0.95, 0.95, lattice)
    phi_axis = np.linspace(-np.pi, np.pi, lattice, endpoint=False)
    z1, z2, phi = np.meshgrid(z_axis, z_axis, phi_axis, indexing="ij")
    seeds = np.stack([z1.ravel(), phi.ravel(), z2.ravel(), phi.ravel()], axis=-1)

    x, res = _damped_newton(seeds, params, max_iter)

    points: List[FixedPoint] = []
    failures: List[RootSearchFailure] = []
    kept: List[NDArray] = []
    for seed, root, r in zip(seeds, x, res):
        if not np.isfinite(r) or r > RESIDUAL_TOL:
            failures.append(
                RootSearchFailure(seed=tuple(float(v) for v in seed), reason=f"residual {r:.3e} after {max_iter} steps")
            )
            continue
        if any(_phase_distance(root, other) < NEWTON_DEDUP_RADIUS for other in kept):
            continue
        kept.append(root)
        points.append(_make_fixed_point(Family.NUMERIC, root, params))

    points.sort(key=lambda fp: (fp.location.z1, fp.location.z2, fp.location.phi1))
    return RootSearch(points=points, failures=failures)


def fixed_points(params: ModelParams) -> List[FixedPoint]:
    """All fixed points of the mean-field flow with their stability.

    Without tilt the closed-form families are returned: FP-I and FP-II always
    (for ``gamma <= J``), both branches of FP-III and FP-IV when
    ``V² + γ² > J²``. With tilt the closed forms no longer apply and a
    multi-start Newton search is used; its failed starts are logged.
    """
    if params.omega_z == 0.0:
        return analytic_fixed_points(params)

    search = find_numeric_fixed_points(params)
    if search.failures:
        logger.warning(
            f"{len(search.failures)} of {NEWTON_LATTICE**3} Newton starts did not converge "
            f"(omega_z={params.omega_z}, V={params.V}, gamma={params.gamma})"
        )
        for failure in search.failures:
            logger.debug(f"Newton start {failure.seed}: {failure.reason}")
    return search.points


def fp4_max_real(V: float, gamma: float, J: float = 1.0) -> float:
    """Largest real part of the FP-IV stability eigenvalues at coupling ``V``."""
    params = ModelParams(J=J, V=V, gamma=gamma, S=0.5)
    candidates = [fp for fp in analytic_fixed_points(params) if fp.family == Family.FP_IV]
    if not candidates:
        raise DomainError(f"FP-IV does not exist at V={V}, gamma={gamma}")
    return candidates[0].max_real


def fp4_stability_boundary(
    gamma: float,
    bracket: Optional[Tuple[float, float]] = None,
    J: float = 1.0,
    n_scan: int = BOUNDARY_SCAN_POINTS,
) -> float:
    """Coupling ``Ṽ_c`` above which the antisymmetric family FP-IV is unstable.

    A dense scan of ``max Re λ`` locates the first sign change of
    ``max Re λ - STABILITY_TOL``; the crossing is then refined by bisection.

    Args:
        gamma (float): Dissipation rate.
        bracket (Optional[Tuple[float, float]]): Scan interval. Defaults to just
            above ``V_c`` up to ``BOUNDARY_V_MAX * J``.
        J (float): Hopping amplitude.
        n_scan (int): Points of the dense scan.

    Returns:
        float: The crossing coupling.

    Raises:
        DomainError: If ``gamma >= J``.
        BracketError: If no sign change is found; the scanned values are attached.
    """
    V_c = critical_coupling(ModelParams(J=J, gamma=gamma, S=0.5))
    lo, hi = bracket if bracket is not None else (V_c + 1e-3 * J, BOUNDARY_V_MAX * J)
    tol = STABILITY_TOL * J

    scan_V = np.linspace(lo, hi, n_scan)
    scan_values = [fp4_max_real(V, gamma, J) for V in scan_V]
    scanned = list(zip(scan_V.tolist(), scan_values))

    for index in range(1, n_scan):
        if scan_values[index - 1] <= tol < scan_values[index]:
            root = brentq(
                lambda v: fp4_max_real(v, gamma, J) - tol,
                scan_V[index - 1],
                scan_V[index],
                xtol=BOUNDARY_XTOL,
            )
            logger.debug(f"FP-IV boundary at gamma={gamma}: V={root:.8f}")
            return float(root)

    raise BracketError(
        f"max Re λ of FP-IV shows no sign change for V in [{lo}, {hi}] at gamma={gamma}",
        scanned=scanned,
    )


def bifurcation_diagram(
    gamma: float, V_grid: Sequence[float], J: float = 1.0, omega_z: float = 0.0
) -> List[BifurcationBranch]:
    """Fixed-point imbalances and stability for each coupling in ``V_grid``."""
    rows: List[BifurcationBranch] = []
    for V in V_grid:
        params = ModelParams(J=J, V=float(V), gamma=gamma, omega_z=omega_z, S=0.5)
        for fp in fixed_points(params):
            rows.append(
                BifurcationBranch(
                    V=float(V),
                    family=fp.family,
                    z1=fp.location.z1,
                    z2=fp.location.z2,
                    classification=fp.classification,
                )
            )
    return rows


def phase_diagram(gamma_grid: Sequence[float], J: float = 1.0) -> List[PhaseBoundary]:
    """Boundary lines ``V_c(γ)`` and ``Ṽ_c(γ)`` of the (V, γ) phase diagram."""
    rows: List[PhaseBoundary] = []
    for gamma in gamma_grid:
        params = ModelParams(J=J, gamma=float(gamma), S=0.5)
        V_c = critical_coupling(params)
        try:
            V_tilde = fp4_stability_boundary(float(gamma), J=J)
        except BracketError as error:
            logger.info(f"No FP-IV boundary at gamma={gamma}: {error}")
            V_tilde = None
        rows.append(PhaseBoundary(gamma=float(gamma), V_c=V_c, V_tilde_c=V_tilde))
    return rows
