"""Seeded Monte Carlo harness.

Four experiment kinds:

``type1``
    rejection rate of the test when window and batch share a law.
``power_curve``
    empirical rejection rate against a mean-shifted batch, next to the
    analytic power, over a grid of batch sizes.
``expansion_check``
    sup distance between the simulated laws of the add and remove
    perturbations, compared with (k/n) / sqrt(2 pi e).
``gaussian_bound``
    exact normal-case remainder of the k/n expansion against 1.2 (k/n)^3.

Replicate ``r`` always draws from ``SeedSequence(master_seed, spawn_key=(r,))``,
so results do not depend on the number of workers.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from . import _kernels
from .alternative import ShiftAlternative, power
from .consistency import TestConfig, test_batch
from .core import Batch, SampleWindow
from .edgeworth import (gaussian_exact_cdf, gaussian_remainder_bound, leading_difference,
                        sup_difference)
from .errors import ConfigError, DeltaTestError
from .generators import GeneratorSpec, sample_sums, standard_generator

KINDS = ("type1", "power_curve", "expansion_check", "gaussian_bound")


def _replicate_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def derived_seed(master_seed: int, *key: int) -> int:
    """Integer seed handed to the resampler in replicate ``key``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(*key, 1 << 20))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class ExperimentConfig:
    kind: str
    generator: Optional[dict] = None
    n: Optional[int] = None
    k: Optional[int] = None
    k_grid: Optional[list] = None
    shift: float = 0.0
    level: float = 0.05
    tail: str = "two"
    null_backend: str = "resample"
    replicates: int = 1000
    resample_N: int = 4000
    master_seed: int = 0
    sigma_source: str = "pooled"
    grid_step: float = 0.01

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("$", "config must be a JSON object")
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown field")
        if "kind" not in d:
            raise ConfigError("kind", "missing")
        return cls(**d)

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}

    def gen_spec(self) -> GeneratorSpec:
        try:
            return GeneratorSpec.from_dict(self.generator)
        except KeyError as exc:
            raise ConfigError(f"generator.{exc.args[0]}", "missing") from None
        except DeltaTestError as exc:
            raise ConfigError("generator", str(exc)) from None

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {', '.join(KINDS)}")
        if not isinstance(self.replicates, int) or self.replicates < 100:
            raise ConfigError("replicates", "must be an integer >= 100")
        if self.n is None or not isinstance(self.n, int) or self.n < 3:
            raise ConfigError("n", "must be an integer >= 3")
        ks = self.k_grid if self.kind == "power_curve" else [self.k]
        path = "k_grid" if self.kind == "power_curve" else "k"
        if not ks or any(not isinstance(k, int) or not 1 <= k < self.n for k in ks):
            raise ConfigError(path, "batch sizes must be integers in [1, n)")
        if not 0 < self.level <= 0.5:
            raise ConfigError("level", "must be in (0, 0.5]")
        if self.tail not in ("left", "right", "two"):
            raise ConfigError("tail", "must be left, right or two")
        if self.null_backend not in ("edgeworth", "gaussian_exact", "resample"):
            raise ConfigError("null_backend", "must be edgeworth, gaussian_exact or resample")
        if self.null_backend == "resample" and any(k > self.n - 2 for k in ks):
            raise ConfigError(path, "resample backend needs k <= n-2")
        if self.resample_N < 100:
            raise ConfigError("resample_N", "must be >= 100")
        if self.kind != "gaussian_bound":
            if self.generator is None:
                raise ConfigError("generator", "missing")
            self.gen_spec()
        if not self.grid_step > 0:
            raise ConfigError("grid_step", "must be > 0")


@dataclass
class ExperimentResult:
    summary: dict
    plot_rows: list = field(default_factory=list)
    seeds: dict = field(default_factory=dict)
    runtime_seconds: float = 0.0


def _chunks(total: int, workers: int):
    size = -(-total // max(workers, 1))
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def _map_ranges(fn, args, total, workers):
    """Apply ``fn(args, lo, hi)`` over contiguous replicate ranges, concatenated in order."""
    ranges = _chunks(total, workers)
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, [args] * len(ranges), *zip(*ranges)))
    else:
        parts = [fn(args, lo, hi) for lo, hi in ranges]
    return [item for part in parts for item in part]


def _binomial_summary(hits: int, total: int) -> dict:
    ci = stats.binomtest(hits, total).proportion_ci(0.95, method="exact")
    return {"rejections": hits, "replicates": total, "rate": hits / total,
            "ci95": [float(ci.low), float(ci.high)]}


def _test_config(cfg: ExperimentConfig, seed: int) -> TestConfig:
    return TestConfig(level=cfg.level, tail=cfg.tail, null_backend=cfg.null_backend,
                      resample_N=cfg.resample_N, seed=seed, sigma_source=cfg.sigma_source,
                      dist_class="gaussian" if cfg.generator and cfg.generator.get("kind") == "normal"
                      else "cramer")


def _type1_range(cfg: ExperimentConfig, lo: int, hi: int):
    spec = cfg.gen_spec()
    out = []
    for r in range(lo, hi):
        rng = _replicate_rng(cfg.master_seed, r)
        w = SampleWindow(standard_generator(spec, cfg.n, rng))
        b = Batch(standard_generator(spec, cfg.k, rng))
        rep = test_batch(w, b, _test_config(cfg, derived_seed(cfg.master_seed, r)))
        out.append((rep.p_value, rep.inconsistent))
    return out


def run_type1(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    res = _map_ranges(_type1_range, cfg, cfg.replicates, workers)
    p = np.array([r[0] for r in res])
    hits = int(sum(r[1] for r in res))
    ks = float(stats.kstest(p, "uniform").statistic)
    ps = np.sort(p)
    rows = [(float(x), float((i + 1) / p.size), "pvalue_ecdf") for i, x in enumerate(ps)]
    summary = {**_binomial_summary(hits, cfg.replicates), "ks_uniform": ks,
               "mean_p_value": float(p.mean())}
    return ExperimentResult(summary, rows)


def _power_range(args, lo: int, hi: int):
    cfg, k = args
    spec = cfg.gen_spec()
    alt_spec = spec.with_shift(cfg.shift)
    out = []
    for r in range(lo, hi):
        rng = _replicate_rng(cfg.master_seed, r, k)
        w = SampleWindow(standard_generator(spec, cfg.n, rng))
        b = Batch(standard_generator(alt_spec, k, rng))
        rep = test_batch(w, b, _test_config(cfg, derived_seed(cfg.master_seed, r, k)))
        out.append(rep.inconsistent)
    return out


def run_power_curve(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    spec = cfg.gen_spec()
    sigma = spec.std()
    mu0 = spec.mean()
    alt = ShiftAlternative(mu0, mu0 + cfg.shift, sigma, sigma)
    points, rows = [], []
    for k in cfg.k_grid:
        hits = int(sum(_map_ranges(_power_range, (cfg, k), cfg.replicates, workers)))
        theory = power(cfg.n, k, cfg.level, cfg.tail, alt, "gaussian_exact")
        points.append({"k": k, **_binomial_summary(hits, cfg.replicates), "theory": theory})
        rows.append((k, hits / cfg.replicates, "empirical"))
        rows.append((k, theory, "theory"))
    return ExperimentResult({"points": points, "drift": alt.drift}, rows)


def simulate_standardized_deltas(spec: GeneratorSpec, n: int, k: int, size: int,
                                 seed=0, sigma: Optional[float] = None) -> dict:
    """Draw ``size`` independent copies of the standardized perturbations.

    Returns ``plus`` = n (Y_{n+k} - Y_n) / (sqrt(k) sigma), ``minus`` =
    n (Y_{n-k} - Y_n) / (sqrt(k) sigma) and ``removal`` = -minus, the removal
    perturbation oriented like the added block.
    """
    rng = np.random.default_rng(seed)
    if sigma is None:
        try:
            sigma = spec.std()
        except NotImplementedError:
            sigma = float(np.std(standard_generator(spec, 1_000_000, rng), ddof=1))
    s_n = sample_sums(spec, n, size, rng)
    s_k = sample_sums(spec, k, size, rng)
    plus = s_k / (n + k) - k * s_n / (n * (n + k))
    s_head = sample_sums(spec, n - k, size, rng)
    s_tail = sample_sums(spec, k, size, rng)
    # Y_{n-k} - Y_n = (k * s_head / (n - k) - s_tail) / n
    minus = (k * s_head / (n - k) - s_tail) / n
    scale = n / (math.sqrt(k) * sigma)
    return {"plus": plus * scale, "minus": minus * scale, "removal": -minus * scale,
            "sigma": sigma}


def sup_cdf_difference(a, b) -> float:
    return float(_kernels.ks_two_sample(np.sort(a), np.sort(b)))


def run_expansion_check(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    spec = cfg.gen_spec()
    sim = simulate_standardized_deltas(spec, cfg.n, cfg.k, cfg.replicates, cfg.master_seed)
    target = sup_difference(cfg.n, cfg.k)
    plus = np.sort(sim["plus"])
    removal = np.sort(sim["removal"])
    minus = np.sort(sim["minus"])
    d_removal = float(_kernels.ks_two_sample(plus, removal))
    d_minus = float(_kernels.ks_two_sample(plus, minus))
    grid = np.arange(-4.0, 4.0 + 1e-9, max(cfg.grid_step, 0.01))
    emp = (np.searchsorted(plus, grid, "right") - np.searchsorted(removal, grid, "right")) / plus.size
    lead = leading_difference(grid, cfg.n, cfg.k)
    rows = [(x, v, "empirical") for x, v in zip(grid, emp)]
    rows += [(x, v, "leading") for x, v in zip(grid, lead)]
    summary = {
        "target": target,
        "sup_difference": d_removal,
        "ratio": d_removal / target,
        "sup_difference_signed_minus": d_minus,
        "ratio_signed_minus": d_minus / target,
        "simulations": cfg.replicates,
        "sigma": sim["sigma"],
        "kernel_backend": _kernels.BACKEND,
    }
    return ExperimentResult(summary, rows)


def gaussian_bound_check(n: int, k: int, step: float = 0.01, half_width: float = 6.0):
    grid = np.round(np.arange(-half_width, half_width + step / 2, step), 10)
    dev = (gaussian_exact_cdf(grid, n, k, "plus") - gaussian_exact_cdf(grid, n, k, "minus")
           - leading_difference(grid, n, k))
    return grid, dev


def run_gaussian_bound(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    grid, dev = gaussian_bound_check(cfg.n, cfg.k, cfg.grid_step)
    bound = gaussian_remainder_bound(cfg.n, cfg.k)
    worst = float(np.max(np.abs(dev)))
    rows = [(x, v, "remainder") for x, v in zip(grid, dev)]
    return ExperimentResult({"max_deviation": worst, "bound": bound, "within_bound": worst <= bound,
                             "argmax_x": float(grid[np.argmax(np.abs(dev))])}, rows)


_RUNNERS = {
    "type1": run_type1,
    "power_curve": run_power_curve,
    "expansion_check": run_expansion_check,
    "gaussian_bound": run_gaussian_bound,
}


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    t0 = time.perf_counter()
    result = _RUNNERS[cfg.kind](cfg, workers)
    result.seeds = {"master_seed": cfg.master_seed, "derivation":
                    "SeedSequence(master_seed, spawn_key=(replicate,))"}
    if cfg.kind == "type1" and cfg.null_backend == "resample":
        result.seeds["resample_seeds"] = [derived_seed(cfg.master_seed, r)
                                          for r in range(cfg.replicates)]
    result.runtime_seconds = time.perf_counter() - t0
    return result
