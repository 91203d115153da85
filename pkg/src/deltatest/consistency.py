"""Single-batch consistency test and the sequential gate over a stream."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Literal, Optional

import numpy as np

from .alternative import critical_values
from .core import (Batch, SampleWindow, delta_plus, estimate_moments,
                   standardized_statistic)
from .edgeworth import AnalyticNull, RegimeDiagnostic, regime_check
from .errors import DegenerateScaleError, DeltaTestError, InvalidKError
from .resample import DEFAULT_REPLICATES, RNG_ALGORITHM, subsample_deltas

Backend = Literal["edgeworth", "gaussian_exact", "resample"]


@dataclass(frozen=True)
class TestConfig:
    level: float = 0.05
    tail: Literal["left", "right", "two"] = "two"
    null_backend: Backend = "resample"
    dist_class: Literal["cramer", "discrete_nonlattice", "gaussian"] = "cramer"
    declared_m: int = 3
    resample_N: int = DEFAULT_REPLICATES
    seed: int = 0
    fold_on_accept: bool = True
    # "pooled": window + batch; "window": reference window only
    sigma_source: Literal["pooled", "window"] = "pooled"
    workers: int = 1

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not 0 < self.level <= 0.5:
            raise DeltaTestError("level must be in (0, 0.5]")
        if self.tail not in ("left", "right", "two"):
            raise DeltaTestError(f"unknown tail {self.tail!r}")
        if self.null_backend not in ("edgeworth", "gaussian_exact", "resample"):
            raise DeltaTestError(f"unknown null backend {self.null_backend!r}")
        if self.dist_class == "cramer" and self.declared_m < 3:
            raise DeltaTestError("declared_m must be >= 3 for the cramer class")
        if self.sigma_source not in ("pooled", "window"):
            raise DeltaTestError(f"unknown sigma source {self.sigma_source!r}")
        if self.resample_N < 100:
            raise DeltaTestError("resample_N must be >= 100")


@dataclass
class TestReport:
    n: int
    k: int
    delta: float
    statistic: float
    p_value: float
    decision: str
    critical_values: list
    regime: Optional[RegimeDiagnostic]
    backend: str
    sigma_hat: float
    seed: Optional[int] = None
    rng: Optional[str] = None
    error: Optional[str] = None

    __test__ = False

    @property
    def inconsistent(self) -> bool:
        return self.decision == "inconsistent"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.to_dict() if self.regime else None
        return d


def _pooled_sample(w: SampleWindow, b: Optional[Batch], source: str) -> np.ndarray:
    if b is None or source == "window":
        return w.values
    return np.concatenate([w.values, b.values])


def build_null(w: SampleWindow, k: int, cfg: TestConfig, batch: Optional[Batch] = None):
    """Null law of the add perturbation for a batch of size ``k``.

    Returns an :class:`AnalyticNull` or :class:`EmpiricalNull`; both expose
    ``cdf`` on the standardized scale, ``raw_cdf`` on the delta scale and a
    ``regime`` diagnostic (attached as attribute for the empirical null).
    """
    n = w.n
    if cfg.null_backend == "resample":
        if not 1 <= k <= n - 2:
            raise InvalidKError(f"need 1 <= k <= n-2 (n={n}, k={k})")
    elif not 1 <= k < n:
        raise InvalidKError(f"need 1 <= k < n (n={n}, k={k})")
    sample = _pooled_sample(w, batch, cfg.sigma_source)
    sigma_hat = float(np.std(sample, ddof=1))
    if not sigma_hat > 0:
        raise DegenerateScaleError("zero sample variance")
    regime = regime_check(n, k, cfg.dist_class, cfg.declared_m)
    if cfg.null_backend == "resample":
        null = subsample_deltas(w, k, cfg.resample_N, cfg.seed, sigma_hat, cfg.workers)
        object.__setattr__(null, "regime", regime)
        return null
    moments = None
    if cfg.null_backend == "edgeworth":
        moments = estimate_moments(SampleWindow(sample), max(cfg.declared_m, 3))
    return AnalyticNull(n, k, cfg.null_backend, "plus", moments, sigma_hat, regime)


def _p_value(left: float, right: float, tail: str) -> float:
    if tail == "left":
        return left
    if tail == "right":
        return right
    return min(1.0, 2.0 * min(left, right))


def test_batch(w: SampleWindow, b: Batch, cfg: TestConfig) -> TestReport:
    """Test one batch against the window; reject iff p < level (strict)."""
    null = build_null(w, b.k, cfg, b)
    sigma_hat = null.sigma_hat if cfg.null_backend == "resample" else null.sigma
    delta = delta_plus(w, b)
    stat = standardized_statistic(delta, w.n, b.k, sigma_hat)
    left, right = null.tail_probabilities(stat)
    p = _p_value(left, right, cfg.tail)
    crit = [float(c) for c in critical_values(null, cfg.level, cfg.tail)]
    resampled = cfg.null_backend == "resample"
    return TestReport(
        n=w.n, k=b.k, delta=delta, statistic=stat, p_value=p,
        decision="inconsistent" if p < cfg.level else "consistent",
        critical_values=crit, regime=null.regime, backend=cfg.null_backend,
        sigma_hat=sigma_hat, seed=cfg.seed if resampled else None,
        rng=RNG_ALGORITHM if resampled else None,
    )


test_batch.__test__ = False


def sequential_gate(initial: SampleWindow, batches: Iterable, cfg: TestConfig) -> list:
    """Test each batch in order against the current window.

    Consistent batches are folded into the window when
    ``cfg.fold_on_accept``; inconsistent ones are reported and skipped.
    Errors are recorded in that batch's report and the gate moves on.
    """
    window = initial
    reports = []
    for j, raw in enumerate(batches):
        try:
            b = raw if isinstance(raw, Batch) else Batch(raw)
            # independent resampling stream per batch position
            bcfg = replace(cfg, seed=int(np.random.SeedSequence([cfg.seed, j]).generate_state(1)[0]))
            report = test_batch(window, b, bcfg)
        except DeltaTestError as exc:
            k = len(raw) if hasattr(raw, "__len__") else 0
            reports.append(TestReport(window.n, k, math.nan, math.nan, math.nan, "error", [],
                                      None, cfg.null_backend, math.nan, error=str(exc)))
            continue
        reports.append(report)
        if cfg.fold_on_accept and not report.inconsistent:
            window = window.extend(b)
    return reports
