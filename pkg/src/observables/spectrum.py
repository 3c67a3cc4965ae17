from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy import fft
from scipy.signal import find_peaks, get_window

from errors import DomainError
from observables.constants import PADDING_FACTOR, SPECTRUM_WINDOW
from observables.observables_types import FourierSpectrum
from utils.grids import uniform_step


def fourier_spectrum(series: ArrayLike, t_grid: ArrayLike, n_peaks: int = 2) -> FourierSpectrum:
    """Hann-windowed magnitude spectrum with 4x zero padding.

    The mean is removed before windowing. Peaks are the strongest local
    maxima, each refined by a parabola through the three bins around it.

    Args:
        series (ArrayLike): Real samples on ``t_grid``.
        t_grid (ArrayLike): Uniform sample times.
        n_peaks (int): Number of peaks to report.

    Returns:
        FourierSpectrum: ``F(ω)`` for ``ω ≥ 0`` and the refined peak positions.

    Raises:
        GridError: If ``t_grid`` is not uniform.
    """
    values = np.asarray(series, dtype=float)
    dt = uniform_step(t_grid)
    if values.shape != np.shape(t_grid):
        raise DomainError(f"series has shape {values.shape}, grid has shape {np.shape(t_grid)}")
    window = get_window(SPECTRUM_WINDOW, values.size, fftbins=False)
    n_fft = PADDING_FACTOR * values.size
    magnitude = np.abs(fft.rfft((values - values.mean()) * window, n=n_fft)) / window.sum()
    omega = 2.0 * np.pi * fft.rfftfreq(n_fft, d=dt)
    bin_width = omega[1] - omega[0]

    candidates, _ = find_peaks(magnitude)
    strongest = candidates[np.argsort(magnitude[candidates])[::-1][:n_peaks]]
    peaks = []
    for index in strongest:
        left, centre, right = magnitude[index - 1 : index + 2]
        curvature = left - 2.0 * centre + right
        offset = 0.5 * (left - right) / curvature if curvature != 0.0 else 0.0
        peaks.append(float(omega[index] + offset * bin_width))
    return FourierSpectrum(
        omega=omega,
        magnitude=magnitude,
        peaks=peaks,
        resolution=float(2.0 * np.pi / (values.size * dt)),
    )
