import numpy as np
from numpy.typing import ArrayLike, NDArray

from errors import GridError

UNIFORM_RTOL = 1e-9


def record_steps(t_grid: ArrayLike, dt: float) -> NDArray:
    """Integer step indices of the output times on a fixed-step lattice.

    Raises:
        GridError: If the grid does not start at 0, is not increasing or is off the ``dt`` lattice.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size < 1 or times[0] != 0.0 or np.any(np.diff(times) <= 0.0):
        raise GridError("output grid must start at 0 and increase strictly")
    steps = np.rint(times / dt).astype(np.int64)
    if np.any(np.abs(steps * dt - times) > 1e-9 * np.maximum(1.0, times)):
        raise GridError(f"output times must be multiples of dt={dt}")
    return steps


def uniform_step(t_grid: ArrayLike) -> float:
    """Spacing of a uniform grid.

    Raises:
        GridError: If the grid has fewer than two points or uneven spacing.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise GridError("a uniform grid needs at least two points")
    spacing = np.diff(times)
    step = float(spacing.mean())
    if step <= 0.0 or np.max(np.abs(spacing - step)) > UNIFORM_RTOL * max(1.0, abs(float(times[-1]))):
        raise GridError("time grid is not uniform")
    return step
