"""Sample windows, batches and the add/remove perturbations of the mean."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DegenerateScaleError, DeltaTestError, InvalidKError

Direction = Literal["plus", "minus"]


def _as_finite_array(values, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).ravel()
    if not np.all(np.isfinite(arr)):
        raise DeltaTestError(f"{what} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SampleWindow:
    """Reference observations X_1..X_n with cached sums (n >= 2)."""

    values: np.ndarray
    sum: float = field(init=False)
    sum_sq: float = field(init=False)

    def __post_init__(self):
        arr = _as_finite_array(self.values, "window")
        if arr.size < 2:
            raise DeltaTestError("a window needs at least 2 observations")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "sum", math.fsum(arr))
        object.__setattr__(self, "sum_sq", math.fsum(arr * arr))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def extend(self, batch: "Batch") -> "SampleWindow":
        """New window with the batch appended at the end."""
        return SampleWindow(np.concatenate([self.values, batch.values]))

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class Batch:
    """New observations X_{n+1}..X_{n+k} (k >= 1)."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_finite_array(self.values, "batch")
        if arr.size < 1:
            raise DeltaTestError("a batch needs at least 1 observation")
        object.__setattr__(self, "values", arr)

    @property
    def k(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.k


@dataclass(frozen=True)
class MomentSummary:
    """Moments of the observation law used by the analytic nulls.

    ``kappa3`` is the third cumulant (third central moment), ``beta3`` the
    absolute third central moment and ``m`` the declared highest finite
    moment order.
    """

    mean: float
    variance: float
    kappa3: float
    beta3: float
    m: int = 3

    def __post_init__(self):
        if not self.variance > 0:
            raise DegenerateScaleError("variance must be strictly positive")
        if self.beta3 < 0 or self.beta3 < abs(self.kappa3) * (1 - 1e-12):
            raise DeltaTestError("beta3 must be >= |kappa3| >= 0")
        if self.m < 3:
            raise DeltaTestError("declared moment order m must be >= 3")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    @property
    def skewness(self) -> float:
        return self.kappa3 / self.variance ** 1.5


def window_mean(w: SampleWindow) -> float:
    return w.sum / w.n


def delta_plus(w: SampleWindow, b: Batch) -> float:
    """Y_{n+k} - Y_n, the shift of the mean when the batch is appended.

    Uses the one-pass form sum(b)/(n+k) - k*sum(w)/(n(n+k)).
    """
    n, k = w.n, b.k
    return math.fsum(b.values) / (n + k) - k * w.sum / (n * (n + k))


def delta_plus_direct(w: SampleWindow, b: Batch) -> float:
    """Same quantity as :func:`delta_plus`, as a difference of two means."""
    n, k = w.n, b.k
    return (w.sum + math.fsum(b.values)) / (n + k) - w.sum / n


def delta_minus(w: SampleWindow, k: int) -> float:
    """Y_{n-k} - Y_n, dropping the last ``k`` values of the window."""
    n = w.n
    if not 1 <= k <= n - 1:
        raise InvalidKError(f"k must satisfy 1 <= k <= n-1 (n={n}, k={k})")
    head = math.fsum(w.values[: n - k])
    return head / (n - k) - w.sum / n


def perturbation_variance(n: int, k: int, sigma2: float, direction: Direction) -> float:
    """Variance of the add (``plus``) or remove (``minus``) perturbation."""
    if not sigma2 > 0:
        raise DegenerateScaleError("sigma2 must be strictly positive")
    if direction == "plus":
        if k < 1 or n < 1:
            raise InvalidKError("need n >= 1 and k >= 1")
        return k * sigma2 / (n * (n + k))
    if direction == "minus":
        if not 1 <= k <= n - 1:
            raise InvalidKError(f"k must satisfy 1 <= k <= n-1 (n={n}, k={k})")
        return k * sigma2 / (n * (n - k))
    raise ValueError(f"unknown direction {direction!r}")


def standardized_statistic(delta: float, n: int, k: int, sigma: float) -> float:
    if not sigma > 0:
        raise DegenerateScaleError("sigma must be strictly positive")
    if k < 1:
        raise InvalidKError("k must be >= 1")
    return n * delta / (math.sqrt(k) * sigma)


def estimate_moments(w: SampleWindow, declared_m: int = 3) -> MomentSummary:
    """Plug-in moments of a window.

    Unbiased variance, bias-corrected third cumulant
    ``n^2 / ((n-1)(n-2)) * m3`` and the mean absolute cubed deviation. On
    very small samples the bias factor can push ``|kappa3|`` above the
    absolute moment; ``beta3`` is then raised to ``|kappa3|``.
    """
    x = w.values
    n = x.size
    if n < 3:
        raise DeltaTestError("moment estimation needs at least 3 observations")
    mean = w.sum / n
    dev = x - mean
    variance = float(np.dot(dev, dev)) / (n - 1)
    if not variance > 0:
        raise DegenerateScaleError("window has zero sample variance")
    m3 = float(np.mean(dev ** 3))
    kappa3 = n * n / ((n - 1) * (n - 2)) * m3
    beta3 = max(float(np.mean(np.abs(dev) ** 3)), abs(kappa3))
    return MomentSummary(mean, variance, kappa3, beta3, declared_m)
