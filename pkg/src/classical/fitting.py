from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy.stats import linregress

from classical.classical_types import GrowthFit
from classical.constants import FIT_LOWER_FACTOR, FIT_MIN_POINTS, FIT_UPPER_FRACTION
from errors import FitError
from utils.logger import LoggerFactory

logger = LoggerFactory.get_logger(name="GROWTH_FIT")


def growth_window(series: ArrayLike) -> tuple[int, int, bool]:
    """Index range ``[start, stop)`` of the automatic exponential-fit window.

    The window runs from the first sample at or above ``FIT_LOWER_FACTOR`` times
    the initial value to the last sample before the peak that is still at or
    below ``FIT_UPPER_FRACTION`` times the peak. When it holds fewer than
    ``FIT_MIN_POINTS`` samples the whole series is returned with the fallback
    flag, so bounded or slowly growing series fit to a rate near zero.
    """
    values = np.asarray(series, dtype=float)
    peak = int(np.argmax(values))
    initial, peak_value = values[0], values[peak]

    above = np.nonzero(values[: peak + 1] >= FIT_LOWER_FACTOR * initial)[0]
    if above.size:
        start = int(above[0])
        below = np.nonzero(values[start : peak + 1] <= FIT_UPPER_FRACTION * peak_value)[0]
        if below.size:
            stop = start + int(below[-1]) + 1
            if stop - start >= FIT_MIN_POINTS:
                return start, stop, False
    return 0, values.size, True


def growth_rate(series: ArrayLike, times: ArrayLike, label: str = "series") -> GrowthFit:
    """Exponential growth rate from a log-linear fit over the automatic window.

    Args:
        series (ArrayLike): Positive quantity such as ℱ(t) or D(t).
        times (ArrayLike): Matching sample times.
        label (str): Name used in log messages.

    Returns:
        GrowthFit: Rate, intercept and the window that was used.

    Raises:
        FitError: If the window holds non-positive values or too few samples.
    """
    values = np.asarray(series, dtype=float)
    t = np.asarray(times, dtype=float)
    start, stop, fallback = growth_window(values)
    if fallback:
        logger.info(
            f"{label}: no window between {FIT_LOWER_FACTOR}x initial and {FIT_UPPER_FRACTION}x peak; "
            "fitting the global trend"
        )

    window = values[start:stop]
    if stop - start < 2:
        raise FitError(f"{label}: fit window [{t[start]}, {t[stop - 1]}] holds {stop - start} sample(s)")
    if np.any(window <= 0.0) or not np.all(np.isfinite(window)):
        raise FitError(f"{label}: non-positive or non-finite values in fit window")

    fit = linregress(t[start:stop], np.log(window))
    return GrowthFit(
        rate=float(fit.slope),
        intercept=float(fit.intercept),
        t_start=float(t[start]),
        t_end=float(t[stop - 1]),
        n_points=stop - start,
        fallback=fallback,
    )
