"""Resampled null: remove k of the n reference values at random, many times.

Each replicate records the removal perturbation Y_n - Y*_{n-k} (the mean
of the window minus the mean of what is left). With this orientation the
replicate has the variance of the removal statistic and the skewness of an
added block, so only the symmetric k/n term separates its law from that of
the add perturbation. That term is added back in :meth:`EmpiricalNull.cdf`.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .core import SampleWindow
from .edgeworth import INV_SQRT_2PI
from .errors import DegenerateScaleError, InvalidKError

RNG_ALGORITHM = "PCG64"
DEFAULT_REPLICATES = 10_000
# replicates per independently seeded block; fixes the random stream
# regardless of how many workers process the blocks
BLOCK_SIZE = 1024


def _block_uniforms(seed: int, block: int, rows: int, k: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    return np.random.Generator(np.random.PCG64(ss)).random((rows, k))


def removal_deltas(values, k: int, replicates: int, seed: int = 0,
                   workers: int = 1) -> np.ndarray:
    """Unsorted Y_n - Y*_{n-k} replicates, deterministic in ``seed``.

    Values are shifted by their first element before summing; the statistic
    is translation invariant and the shift keeps constant windows exactly 0.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if not 1 <= k <= n - 1:
        raise InvalidKError(f"need 1 <= k <= n-1 (n={n}, k={k})")
    z = x - x[0]
    zbar = float(np.mean(z))
    nblocks = -(-replicates // BLOCK_SIZE)

    def run(b):
        rows = min(BLOCK_SIZE, replicates - b * BLOCK_SIZE)
        sums = _kernels.subsample_sums(z, _block_uniforms(seed, b, rows, k))
        return (sums - k * zbar) / (n - k)

    if workers > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(nblocks)))
    else:
        parts = [run(b) for b in range(nblocks)]
    return np.concatenate(parts)


@dataclass(frozen=True, eq=False)
class EmpiricalNull:
    """Sorted removal replicates plus what is needed for the k/n correction."""

    deltas: np.ndarray
    n: int
    k: int
    sigma_hat: float
    seed: int
    algorithm: str = RNG_ALGORITHM
    regime: Optional[object] = None
    _steps: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = np.sort(np.asarray(self.deltas, dtype=np.float64))
        d.setflags(write=False)
        object.__setattr__(self, "deltas", d)
        if d.size < 100:
            raise ValueError("need at least 100 replicates")
        if not self.sigma_hat > 0:
            raise DegenerateScaleError("sigma_hat must be strictly positive")
        # corrected CDF at each replicate, monotone by running maximum
        frac = np.arange(1, d.size + 1) / d.size
        raw = np.clip(frac + self._leading(d), 0.0, 1.0)
        steps = np.maximum.accumulate(raw)
        steps.setflags(write=False)
        object.__setattr__(self, "_steps", steps)

    @property
    def replicates(self) -> int:
        return int(self.deltas.size)

    def _leading(self, y):
        x = self.standardize(y)
        return (self.k / self.n) * x * INV_SQRT_2PI * np.exp(-0.5 * x * x)

    def standardize(self, y):
        return self.n * np.asarray(y, dtype=np.float64) / (math.sqrt(self.k) * self.sigma_hat)

    def unstandardize(self, x):
        return np.asarray(x, dtype=np.float64) * math.sqrt(self.k) * self.sigma_hat / self.n

    def raw_cdf_uncorrected(self, y):
        out = np.searchsorted(self.deltas, y, side="right") / self.replicates
        return out if np.ndim(out) else float(out)

    def raw_cdf(self, y, corrected: bool = True):
        """Right-continuous step CDF on the replicate grid."""
        if not corrected:
            return self.raw_cdf_uncorrected(y)
        i = np.searchsorted(self.deltas, y, side="right")
        out = np.where(i > 0, self._steps[np.maximum(i - 1, 0)], 0.0)
        return out if np.ndim(out) else float(out)

    def _raw_cdf_left(self, y):
        i = np.searchsorted(self.deltas, y, side="left")
        return np.where(i > 0, self._steps[np.maximum(i - 1, 0)], 0.0)

    def cdf(self, x):
        """Corrected CDF on the standardized scale."""
        return self.raw_cdf(self.unstandardize(x))

    def tail_probabilities(self, x: float) -> tuple[float, float]:
        """Add-one tail probabilities (1 + N F)/(N + 1) so neither is ever 0."""
        y = float(self.unstandardize(x))
        N = self.replicates
        left = float(self.raw_cdf(y))
        right = 1.0 - float(self._raw_cdf_left(y))
        return (1.0 + N * left) / (N + 1.0), (1.0 + N * right) / (N + 1.0)

    def raw_quantile(self, p: float, corrected: bool = True) -> float:
        if not 0 < p < 1:
            raise ValueError("p must be in (0, 1)")
        if not corrected:
            return float(np.quantile(self.deltas, p, method="lower"))
        i = int(np.searchsorted(self._steps, p, side="left"))
        return float(self.deltas[min(i, self.replicates - 1)])

    def ppf(self, p: float) -> float:
        return float(self.standardize(self.raw_quantile(p, corrected=True)))

    def corrected_steps(self) -> np.ndarray:
        return self._steps


def subsample_deltas(w: SampleWindow, k: int, replicates: int = DEFAULT_REPLICATES,
                     seed: int = 0, sigma_hat: Optional[float] = None,
                     workers: int = 1) -> EmpiricalNull:
    """Build the resampled null from a window.

    ``sigma_hat`` defaults to the window's sample standard deviation; callers
    that also hold the batch may pass a pooled estimate instead.
    """
    n = w.n
    if not 1 <= k <= n - 2:
        raise InvalidKError(f"need 1 <= k <= n-2 (n={n}, k={k})")
    if replicates < 100:
        raise ValueError("need at least 100 replicates")
    if sigma_hat is None:
        sigma_hat = float(np.std(w.values, ddof=1))
    if not sigma_hat > 0:
        raise DegenerateScaleError("window has zero variance")
    deltas = removal_deltas(w.values, k, replicates, seed, workers)
    return EmpiricalNull(deltas, n, k, float(sigma_hat), int(seed))


def corrected_cdf(e: EmpiricalNull, y):
    return e.raw_cdf(y, corrected=True)


def empirical_quantile(e: EmpiricalNull, p: float, corrected: bool = True) -> float:
    return e.raw_quantile(p, corrected=corrected)


def ks_to_reference(e: EmpiricalNull, reference_cdf, corrected: bool = True) -> float:
    """sup_x |F_e(x) - G(x)| on the standardized scale, checking both sides
    of every jump of the step CDF."""
    x = e.standardize(e.deltas)
    steps = e.corrected_steps() if corrected else np.arange(1, x.size + 1) / x.size
    before = np.concatenate([[0.0], steps[:-1]])
    g = np.asarray(reference_cdf(x), dtype=np.float64)
    return float(max(np.max(np.abs(steps - g)), np.max(np.abs(before - g))))
