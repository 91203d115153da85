"""Random data for Monte Carlo work.

Includes the log-likelihood variables of a categorical model, their
Dirichlet-smoothed (absolutely continuous) version, and a few standard laws.
Every sampler takes an integer seed or a ``numpy.random.Generator``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DeltaTestError


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class CategoricalModel:
    theta: np.ndarray
    symbols: Optional[Sequence[str]] = None

    def __post_init__(self):
        t = np.array(self.theta, dtype=np.float64).ravel()
        if t.size < 1 or np.any(~(t > 0)):
            raise DeltaTestError("theta entries must all be > 0")
        if abs(math.fsum(t) - 1.0) > 1e-12:
            raise DeltaTestError("theta must sum to 1")
        if self.symbols is not None and len(self.symbols) != t.size:
            raise DeltaTestError("symbols and theta differ in length")
        t.setflags(write=False)
        object.__setattr__(self, "theta", t)


@dataclass(frozen=True)
class DirichletRegularization:
    concentration: float

    def __post_init__(self):
        if not self.concentration > 0:
            raise DeltaTestError("Dirichlet concentration must be > 0")


def sample_categorical_loglik(model: CategoricalModel, count: int, seed=None) -> np.ndarray:
    """log theta_J with J drawn from theta."""
    rng = _rng(seed)
    j = rng.choice(model.theta.size, size=count, p=model.theta)
    return np.log(model.theta)[j]


def sample_dirichlet(model: CategoricalModel, reg: DirichletRegularization, count: int,
                     seed=None) -> np.ndarray:
    """(count, N) Dirichlet(lambda * theta) vectors via normalised gammas."""
    rng = _rng(seed)
    g = rng.standard_gamma(reg.concentration * model.theta, size=(count, model.theta.size))
    return g / g.sum(axis=1, keepdims=True)


def sample_dirichlet_loglik(model: CategoricalModel, reg: DirichletRegularization,
                            count: int, seed=None) -> np.ndarray:
    """Per draw: alpha ~ Dir(lambda theta), J ~ alpha, emit log alpha_J."""
    rng = _rng(seed)
    alpha = sample_dirichlet(model, reg, count, rng)
    cum = np.cumsum(alpha, axis=1)
    u = rng.random(count) * cum[:, -1]
    j = (cum < u[:, None]).sum(axis=1)
    j = np.minimum(j, model.theta.size - 1)
    return np.log(alpha[np.arange(count), j])


def dirichlet_marginal_moments(theta_i: float, concentration: float) -> tuple[float, float]:
    if not 0 < theta_i < 1:
        raise DeltaTestError("theta_i must be in (0, 1)")
    if not concentration > 0:
        raise DeltaTestError("concentration must be > 0")
    return theta_i, theta_i * (1.0 - theta_i) / (concentration + 1.0)


@dataclass(frozen=True)
class GeneratorSpec:
    """One of: normal(mu, sigma), exponential(rate), shifted(mu, sigma, shift),
    two_point(p, a, b) [a w.p. p, else b], categorical(theta),
    dirichlet(theta, concentration)."""

    kind: str
    params: dict

    KINDS = ("normal", "exponential", "shifted", "two_point", "categorical", "dirichlet")

    def __post_init__(self):
        p = self.params
        k = self.kind
        if k not in self.KINDS:
            raise DeltaTestError(f"unknown generator kind {k!r}")
        if k in ("normal", "shifted") and not p.get("sigma", 1.0) > 0:
            raise DeltaTestError("sigma must be > 0")
        if k == "exponential" and not p.get("rate", 1.0) > 0:
            raise DeltaTestError("rate must be > 0")
        if k == "two_point":
            if not 0 < p.get("p", 0.5) < 1:
                raise DeltaTestError("p must be in (0, 1)")
            if p.get("a", -1.0) == p.get("b", math.sqrt(2.0)):
                raise DeltaTestError("two_point needs distinct support points")
        if k in ("categorical", "dirichlet"):
            CategoricalModel(p["theta"])
        if k == "dirichlet":
            DirichletRegularization(p["concentration"])

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        d = dict(d)
        kind = d.pop("kind")
        return cls(kind, d)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    def with_shift(self, shift: float) -> "GeneratorSpec":
        """Same law translated by ``shift``."""
        p = dict(self.params)
        if self.kind == "normal":
            return GeneratorSpec("shifted", {**p, "shift": shift})
        p["shift"] = p.get("shift", 0.0) + shift
        return GeneratorSpec(self.kind, p)

    # population moments where closed forms exist
    def mean(self) -> float:
        p, k = self.params, self.kind
        if k in ("normal", "shifted"):
            base = p.get("mu", 0.0)
        elif k == "exponential":
            base = 1.0 / p.get("rate", 1.0)
        elif k == "two_point":
            q = p.get("p", 0.5)
            base = q * p.get("a", -1.0) + (1 - q) * p.get("b", math.sqrt(2.0))
        elif k == "categorical":
            t = np.asarray(p["theta"], float)
            base = float(np.sum(t * np.log(t)))
        else:
            raise NotImplementedError("no closed-form mean for dirichlet")
        return base + p.get("shift", 0.0)

    def std(self) -> float:
        p, k = self.params, self.kind
        if k in ("normal", "shifted"):
            return p.get("sigma", 1.0)
        if k == "exponential":
            return 1.0 / p.get("rate", 1.0)
        if k == "two_point":
            q = p.get("p", 0.5)
            return math.sqrt(q * (1 - q)) * abs(p.get("a", -1.0) - p.get("b", math.sqrt(2.0)))
        if k == "categorical":
            t = np.asarray(p["theta"], float)
            lt = np.log(t)
            mu = float(np.sum(t * lt))
            return math.sqrt(float(np.sum(t * (lt - mu) ** 2)))
        raise NotImplementedError("no closed-form sd for dirichlet")


def standard_generator(spec: GeneratorSpec, count: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    p, k = spec.params, spec.kind
    shift = p.get("shift", 0.0)
    if k in ("normal", "shifted"):
        x = rng.normal(p.get("mu", 0.0), p.get("sigma", 1.0), count)
    elif k == "exponential":
        x = rng.exponential(1.0 / p.get("rate", 1.0), count)
    elif k == "two_point":
        hit = rng.random(count) < p.get("p", 0.5)
        x = np.where(hit, p.get("a", -1.0), p.get("b", math.sqrt(2.0)))
    elif k == "categorical":
        x = sample_categorical_loglik(CategoricalModel(p["theta"]), count, rng)
    else:
        x = sample_dirichlet_loglik(CategoricalModel(p["theta"]),
                                    DirichletRegularization(p["concentration"]), count, rng)
    return x + shift if shift else x


def sample_sums(spec: GeneratorSpec, count: int, size: int, seed=None,
                chunk: int = 2_000_000) -> np.ndarray:
    """``size`` independent sums of ``count`` draws each.

    Exact in law: closed-form sum distributions where they exist (normal,
    gamma, binomial, multinomial), direct summation otherwise.
    """
    rng = _rng(seed)
    p, k = spec.params, spec.kind
    total_shift = count * p.get("shift", 0.0)
    if count == 0:
        return np.zeros(size)
    if k in ("normal", "shifted"):
        s = rng.normal(count * p.get("mu", 0.0), math.sqrt(count) * p.get("sigma", 1.0), size)
    elif k == "exponential":
        s = rng.gamma(count, 1.0 / p.get("rate", 1.0), size)
    elif k == "two_point":
        hits = rng.binomial(count, p.get("p", 0.5), size)
        s = hits * p.get("a", -1.0) + (count - hits) * p.get("b", math.sqrt(2.0))
    elif k == "categorical":
        t = CategoricalModel(p["theta"]).theta
        s = rng.multinomial(count, t, size) @ np.log(t)
    else:
        rows = max(1, chunk // count)
        out = []
        done = 0
        while done < size:
            m = min(rows, size - done)
            out.append(standard_generator(GeneratorSpec(k, {**p, "shift": 0.0}), m * count, rng)
                       .reshape(m, count).sum(axis=1))
            done += m
        s = np.concatenate(out)
    return s + total_shift
