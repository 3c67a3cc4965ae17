from __future__ import annotations

from typing import Iterable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray


class KahanSum:
    """Compensated (Kahan-Babuska) running sum over arrays of a fixed shape.

    Ensemble reductions feed partial sums in block-index order; compensation
    keeps the result independent of how members were grouped to ~1e-15.
    """

    def __init__(self, shape: tuple[int, ...], dtype: type = np.float64) -> None:
        self.total: NDArray = np.zeros(shape, dtype=dtype)
        self._compensation: NDArray = np.zeros(shape, dtype=dtype)
        self.count = 0

    def add(self, value: ArrayLike, weight: int = 1) -> None:
        value = np.asarray(value, dtype=self.total.dtype)
        t = self.total + value
        big = np.abs(self.total) >= np.abs(value)
        self._compensation += np.where(big, (self.total - t) + value, (value - t) + self.total)
        self.total = t
        self.count += weight

    def merge(self, other: KahanSum) -> None:
        self.add(other.value(), weight=other.count)

    def value(self) -> NDArray:
        return self.total + self._compensation

    def mean(self) -> NDArray:
        if self.count == 0:
            raise ZeroDivisionError("mean of an empty accumulator")
        return self.value() / self.count


def compensated_sum(values: Iterable[ArrayLike], shape: Optional[tuple[int, ...]] = None) -> NDArray:
    """Compensated sum of a sequence of equally shaped arrays."""
    accumulator: Optional[KahanSum] = None
    for value in values:
        array = np.asarray(value)
        if accumulator is None:
            dtype = np.complex128 if np.iscomplexobj(array) else np.float64
            accumulator = KahanSum(shape or array.shape, dtype=dtype)
        accumulator.add(array)
    if accumulator is None:
        if shape is None:
            raise ValueError("cannot infer shape of an empty sum")
        return np.zeros(shape)
    return accumulator.value()
