"""Law of the standardized statistic under a mean-shift alternative, test
power, and the smallest batch reaching a target power."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Union

from scipy import special

from .edgeworth import AnalyticNull, RegimeDiagnostic, regime_check
from .errors import DegenerateScaleError, InvalidAlternativeError, NoSolutionError

Tail = Literal["left", "right", "two"]
NullSpec = Union[str, AnalyticNull, object, Callable[[int, int], object]]

# k cap when no reference size is given (asymptotic mode)
_ASYMPTOTIC_K_CAP = 10 ** 12


@dataclass(frozen=True)
class ShiftAlternative:
    """New observations have mean ``mu1`` and sd ``sigma1``; the reference
    window has mean ``mu0`` (and optionally sd ``sigma0``)."""

    mu0: float
    mu1: float
    sigma1: float
    sigma0: Optional[float] = None

    def __post_init__(self):
        if not self.sigma1 > 0:
            raise DegenerateScaleError("sigma1 must be strictly positive")
        if self.sigma0 is not None and not self.sigma0 > 0:
            raise DegenerateScaleError("sigma0 must be strictly positive")
        if not math.isfinite(self.drift):
            raise ValueError("drift (mu1 - mu0) / sigma1 must be finite")

    @property
    def drift(self) -> float:
        return (self.mu1 - self.mu0) / self.sigma1


def h1_shift(n: Optional[int], k: int, alt: ShiftAlternative, simplified: bool = False) -> float:
    """Mean of the standardized statistic under the alternative."""
    base = math.sqrt(k) * alt.drift
    if simplified or n is None:
        return base
    return n / (n + k) * base


def h1_variance(n: Optional[int], k: int, alt: ShiftAlternative) -> float:
    """Inflated variance 1 + A k/n with A at its upper bound 1 + sigma0^2/sigma1^2."""
    if n is None or alt.sigma0 is None:
        return 1.0
    a = 1.0 + (alt.sigma0 / alt.sigma1) ** 2
    return 1.0 + a * k / n


def h1_cdf(x, n: Optional[int], k: int, alt: ShiftAlternative, simplified: bool = False,
           variance_correction: bool = False):
    """Phi(x - shift), optionally with the widened H1 variance (needs sigma0)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    shift = h1_shift(n, k, alt, simplified)
    scale = math.sqrt(h1_variance(n, k, alt)) if variance_correction else 1.0
    return special.ndtr((x - shift) / scale)


def approximation_order(n: int, k: int) -> dict:
    """Remainder order n^-beta, beta = min(alpha/2, 1 - alpha), alpha = log k / log n."""
    alpha = math.log(k) / math.log(n) if n > 1 else 0.0
    beta = min(alpha / 2.0, 1.0 - alpha)
    return {"alpha": alpha, "beta": beta, "score": n ** (-beta)}


def resolve_null(null: NullSpec, n: Optional[int], k: int):
    """Turn a null spec into an object with ``ppf``.

    Strings: ``normal`` (Phi) or ``gaussian_exact``. Callables are invoked
    with (n, k). Anything else is used as is.
    """
    if isinstance(null, str):
        if null == "normal" or n is None:
            return AnalyticNull(max(k + 1, 2), k, backend="normal")
        if null == "gaussian_exact":
            return AnalyticNull(n, k, backend="gaussian_exact")
        raise ValueError(f"unknown null {null!r}")
    if callable(null) and not hasattr(null, "ppf"):
        return null(n, k)
    return null


def critical_values(null, level: float, tail: Tail) -> tuple:
    if tail == "right":
        return (null.ppf(1.0 - level),)
    if tail == "left":
        return (null.ppf(level),)
    if tail == "two":
        return (null.ppf(level / 2.0), null.ppf(1.0 - level / 2.0))
    raise ValueError(f"unknown tail {tail!r}")


def power(n: Optional[int], k: int, level: float, tail: Tail, alt: ShiftAlternative,
          null: NullSpec = "gaussian_exact", simplified: bool = False,
          variance_correction: bool = False) -> float:
    """Rejection probability under the alternative with critical values
    taken from ``null`` at ``level`` (split equally for two tails)."""
    if not 0 < level <= 0.5:
        raise ValueError("level must be in (0, 0.5]")
    crit = critical_values(resolve_null(null, n, k), level, tail)
    cdf = lambda c: float(h1_cdf(c, n, k, alt, simplified, variance_correction))
    if tail == "right":
        return 1.0 - cdf(crit[0])
    if tail == "left":
        return cdf(crit[0])
    return cdf(crit[0]) + 1.0 - cdf(crit[1])


@dataclass(frozen=True)
class MinBatchResult:
    k: int
    power: float
    power_below: Optional[float]
    regime: Optional[RegimeDiagnostic]
    approximation: Optional[dict]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "power": self.power,
            "power_at_k_minus_1": self.power_below,
            "regime": self.regime.to_dict() if self.regime else None,
            "approximation": self.approximation,
        }


def min_batch_size(n: Optional[int], level: float, target_power: float,
                   alt: ShiftAlternative, tail: Tail = "right",
                   null: NullSpec = "gaussian_exact", simplified: bool = False,
                   dist_class: str = "cramer", m: int = 3,
                   variance_correction: bool = False) -> MinBatchResult:
    """Smallest k >= 1 whose power reaches ``target_power``.

    Exponential bracketing then bisection; power is non-decreasing in k for
    k < n. With ``n=None`` the n -> infinity limit is used (simplified shift,
    plain normal null) and no regime diagnostic is produced.
    """
    if not 0 < level < target_power < 1:
        raise ValueError("need 0 < level < target_power < 1")
    if alt.drift == 0:
        raise InvalidAlternativeError("mu1 == mu0: no mean shift to detect")
    cap = _ASYMPTOTIC_K_CAP if n is None else n - 1
    if cap < 1:
        raise NoSolutionError("n too small for any batch")

    def pw(k):
        return power(n, k, level, tail, alt, null, simplified, variance_correction)

    lo, hi = 0, 1
    while pw(hi) < target_power:
        if hi >= cap:
            raise NoSolutionError(
                f"power never reaches {target_power} for k <= {cap}")
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pw(mid) >= target_power:
            hi = mid
        else:
            lo = mid
    k = hi
    below = pw(k - 1) if k > 1 else None
    regime = approx = None
    if n is not None:
        regime = regime_check(n, k, dist_class, m)
        approx = approximation_order(n, k)
    return MinBatchResult(k, pw(k), below, regime, approx)
