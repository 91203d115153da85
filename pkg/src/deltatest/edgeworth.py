"""Analytic null laws of the standardized perturbation statistic.

All CDFs here are on the standardized scale x = n * delta / (sqrt(k) * sigma).
The ``minus`` direction describes the removal perturbation oriented like the
added block, i.e. n * (Y_n - Y_{n-k}) / (sqrt(k) sigma): it shares the
variance n / (n - k) of Y_{n-k} - Y_n but carries the skewness of the block
sum, which is what the resampled null records.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy import optimize, special

from .core import Direction, MomentSummary
from .errors import DegenerateScaleError, InvalidKError

DistClass = Literal["cramer", "discrete_nonlattice", "gaussian"]
AnalyticBackend = Literal["edgeworth", "gaussian_exact", "normal"]

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
# small-ratio cutoff for the gaussian regime flag; keeps 1.2 (k/n)^3 < 1e-2
GAUSSIAN_MAX_RATIO = 0.2


def std_normal_cdf(x):
    return special.ndtr(x)


def std_normal_pdf(x):
    x = np.asarray(x, dtype=np.float64)
    out = INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return out if out.ndim else float(out)


def std_normal_ppf(p):
    return special.ndtri(p)


def _check_nk(n: int, k: int):
    if not 1 <= k < n:
        raise InvalidKError(f"need 1 <= k < n (n={n}, k={k})")


def leading_difference(x, n: int, k: int):
    """First-order gap F_plus(x) - F_minus(x) = (k/n) x phi(x)."""
    _check_nk(n, k)
    x = np.asarray(x, dtype=np.float64)
    out = (k / n) * x * INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return out if out.ndim else float(out)


def sup_difference(n: int, k: int) -> float:
    """sup_x |leading_difference|, reached at x = +-1: (k/n) / sqrt(2 pi e)."""
    _check_nk(n, k)
    return (k / n) / math.sqrt(2.0 * math.pi * math.e)


def gaussian_exact_cdf(x, n: int, k: int, direction: Direction):
    """Exact standardized CDF for normal data: variance n/(n+k) or n/(n-k)."""
    _check_nk(n, k)
    if direction == "plus":
        scale = math.sqrt(1.0 + k / n)
    elif direction == "minus":
        scale = math.sqrt(1.0 - k / n)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    out = special.ndtr(np.asarray(x, dtype=np.float64) * scale)
    return out if np.ndim(out) else float(out)


def gaussian_remainder_bound(n: int, k: int) -> float:
    _check_nk(n, k)
    return 1.2 * (k / n) ** 3


@dataclass(frozen=True)
class RegimeDiagnostic:
    """Where k sits relative to the window of exponents alpha = log k / log n
    in which the k/n expansion is known to hold."""

    n: int
    k: int
    alpha: float
    window_lo: float
    window_hi: float
    valid: bool
    dist_class: str
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "window": [self.window_lo, self.window_hi],
            "valid": self.valid,
            "dist_class": self.dist_class,
            "note": self.note,
        }


def regime_check(n: int, k: int, dist_class: DistClass = "cramer", m: int = 3,
                 eps: float = 0.0) -> RegimeDiagnostic:
    """Diagnose whether (n, k) lies in the validity window. Never raises on
    out-of-window input; only malformed arguments raise.

    Windows: ``cramer`` (2/(m+2), 1), ``discrete_nonlattice`` (2/3, 1).
    ``gaussian`` has no lower window and is flagged valid iff k/n <= 0.2.
    ``eps`` shrinks the open window on both sides.
    """
    if n < 2:
        raise InvalidKError("need n >= 2")
    _check_nk(n, k)
    alpha = math.log(k) / math.log(n)
    if dist_class == "cramer":
        if m < 1:
            raise ValueError("m must be >= 1 for the cramer class")
        lo, hi = 2.0 / (m + 2) + eps, 1.0 - eps
        return RegimeDiagnostic(n, k, alpha, lo, hi, lo < alpha < hi, dist_class)
    if dist_class == "discrete_nonlattice":
        lo, hi = 2.0 / 3.0 + eps, 1.0 - eps
        return RegimeDiagnostic(n, k, alpha, lo, hi, lo < alpha < hi, dist_class)
    if dist_class == "gaussian":
        ok = k / n <= GAUSSIAN_MAX_RATIO
        note = "" if ok else f"k/n = {k / n:.3g} exceeds {GAUSSIAN_MAX_RATIO}"
        return RegimeDiagnostic(n, k, alpha, 0.0, 1.0, ok, dist_class, note)
    raise ValueError(f"unknown distribution class {dist_class!r}")


def edgeworth_cdf_unclamped(x, n: int, k: int, moments: MomentSummary,
                            direction: Direction):
    """Phi(x) +- (k/2n) x phi(x) - kappa3/(6 sigma^3 sqrt(k)) (x^2 - 1) phi(x)."""
    _check_nk(n, k)
    if not moments.variance > 0:
        raise DegenerateScaleError("variance must be strictly positive")
    if direction == "plus":
        sign = 1.0
    elif direction == "minus":
        sign = -1.0
    else:
        raise ValueError(f"unknown direction {direction!r}")
    x = np.asarray(x, dtype=np.float64)
    phi = INV_SQRT_2PI * np.exp(-0.5 * x * x)
    skew = moments.kappa3 / (6.0 * moments.variance ** 1.5 * math.sqrt(k))
    out = special.ndtr(x) + sign * (k / (2.0 * n)) * x * phi - skew * (x * x - 1.0) * phi
    return out if out.ndim else float(out)


def edgeworth_cdf(x, n: int, k: int, moments: MomentSummary, direction: Direction = "plus"):
    out = np.clip(edgeworth_cdf_unclamped(x, n, k, moments, direction), 0.0, 1.0)
    return out if np.ndim(out) else float(out)


# evaluation grid for quantiles and the monotonicity diagnostic
_GRID = np.linspace(-12.0, 12.0, 4801)


@dataclass(frozen=True)
class AnalyticNull:
    """Closed-form null for the standardized statistic.

    ``backend`` is ``edgeworth`` (needs moments), ``gaussian_exact`` or
    ``normal`` (plain Phi, the k/n -> 0 limit). ``sigma`` maps the raw
    delta scale to the standardized one; it defaults to the moment sigma.
    """

    n: int
    k: int
    backend: AnalyticBackend = "gaussian_exact"
    direction: Direction = "plus"
    moments: Optional[MomentSummary] = None
    sigma: Optional[float] = None
    regime: Optional[RegimeDiagnostic] = None

    def __post_init__(self):
        _check_nk(self.n, self.k)
        if self.backend == "edgeworth" and self.moments is None:
            raise ValueError("edgeworth backend needs moments")
        if self.backend not in ("edgeworth", "gaussian_exact", "normal"):
            raise ValueError(f"unknown analytic backend {self.backend!r}")
        if self.sigma is None and self.moments is not None:
            object.__setattr__(self, "sigma", self.moments.sigma)
        if self.sigma is not None and not self.sigma > 0:
            raise DegenerateScaleError("sigma must be strictly positive")

    def cdf(self, x):
        if self.backend == "edgeworth":
            return edgeworth_cdf(x, self.n, self.k, self.moments, self.direction)
        if self.backend == "gaussian_exact":
            return gaussian_exact_cdf(x, self.n, self.k, self.direction)
        return std_normal_cdf(x)

    def raw_cdf(self, y):
        return self.cdf(self.standardize(y))

    def standardize(self, y):
        if self.sigma is None:
            raise DegenerateScaleError("no sigma attached to this null")
        return self.n * np.asarray(y, dtype=np.float64) / (math.sqrt(self.k) * self.sigma)

    def tail_probabilities(self, x: float) -> tuple[float, float]:
        """(P[T <= x], P[T >= x]) under the null."""
        left = float(self.cdf(x))
        return left, 1.0 - left

    def ppf(self, p: float) -> float:
        if not 0 < p < 1:
            raise ValueError("p must be in (0, 1)")
        if self.backend == "gaussian_exact":
            scale = math.sqrt(1.0 + (self.k if self.direction == "plus" else -self.k) / self.n)
            return float(special.ndtri(p) / scale)
        if self.backend == "normal":
            return float(special.ndtri(p))
        # first crossing on the grid, refined by root finding
        vals = self.cdf(_GRID)
        idx = int(np.searchsorted(np.maximum.accumulate(vals), p, side="left"))
        if idx == 0:
            return float(_GRID[0])
        if idx >= _GRID.size:
            return float(_GRID[-1])
        lo, hi = _GRID[idx - 1], _GRID[idx]
        f = lambda t: float(self.cdf(t)) - p
        if f(lo) * f(hi) > 0:
            return float(hi)
        return float(optimize.brentq(f, lo, hi, xtol=1e-12))

    def monotonicity_violation(self) -> float:
        """Largest drop of the CDF on the evaluation grid (0 if monotone)."""
        vals = np.asarray(self.cdf(_GRID))
        drops = np.maximum.accumulate(vals) - vals
        return float(drops.max())

    @property
    def non_monotone(self) -> bool:
        return self.monotonicity_violation() > 1e-6
