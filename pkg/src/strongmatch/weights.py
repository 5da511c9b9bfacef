"""Random edge weights and the minimum weight of a maximum k-strong matching.

``M_k(H)`` is the least total weight over all k-strong matchings of maximum
size ``nu_k(H)`` (size first, weight second).  This module provides the weight
families, their moments and CDF envelopes, exact ``M_k`` solves, and the Monte
Carlo statistics that compare sampled ``M_k`` against the mean, variance and
deviation bounds:

* ``E M_k <= mu * nu_k`` with ``mu = max_e E w(e)``;
* ``var M_k <= 4 * mu2 * nu_k`` with ``mu2 = max_e E w(e)^2``;
* ``P(M_k >= nu_k * gamma / 2) >= 1 - 2 exp(-m F1(gamma) / 16)`` whenever
  ``F2(gamma) <= 1 / (24 Delta^(k+1))``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence, Union

import numpy as np

from . import mis
from .errors import (
    EmptyGraph,
    InvalidModel,
    NoFeasibleGamma,
    TooFewTrials,
    UnboundedMoment,
)
from .graph import Graph, max_degree
from .matching import Matching, conflict_bitsets
from .rng import keyed_uniform

MIN_TRIALS = 30
SIGMAS = 3.0


# --- distributions -----------------------------------------------------------

@dataclass(frozen=True)
class Exponential:
    rate: float = 1.0

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise InvalidModel(f"exponential rate must be positive, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def second_moment(self) -> float:
        return 2.0 / self.rate ** 2

    def cdf(self, x: float) -> float:
        return 0.0 if x < 0 else -math.expm1(-self.rate * x)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return -np.log1p(-u) / self.rate

    def to_json(self) -> dict[str, Any]:
        return {"kind": "exponential", "rate": self.rate}

    def label(self) -> str:
        return f"exponential(rate={self.rate!r})"


@dataclass(frozen=True)
class Uniform:
    """Uniform on ``[0, b]``."""

    b: float = 1.0

    def __post_init__(self):
        if not (self.b > 0 and math.isfinite(self.b)):
            raise InvalidModel(f"uniform upper end must be positive, got {self.b}")

    @property
    def mean(self) -> float:
        return self.b / 2.0

    @property
    def second_moment(self) -> float:
        return self.b * self.b / 3.0

    def cdf(self, x: float) -> float:
        return min(max(x / self.b, 0.0), 1.0)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return u * self.b

    def to_json(self) -> dict[str, Any]:
        return {"kind": "uniform", "b": self.b}

    def label(self) -> str:
        return f"uniform(b={self.b!r})"


@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise InvalidModel(f"constant weight must be finite and nonnegative, got {self.c}")

    @property
    def mean(self) -> float:
        return self.c

    @property
    def second_moment(self) -> float:
        return self.c * self.c

    def cdf(self, x: float) -> float:
        return 1.0 if x >= self.c else 0.0

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return np.full(np.shape(u), self.c, dtype=np.float64)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "constant", "c": self.c}

    def label(self) -> str:
        return f"constant(c={self.c!r})"


@dataclass(frozen=True)
class BernoulliIndicator:
    """Weight ``1`` if a uniform ``Z < p`` else ``0``."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InvalidModel(f"indicator probability must lie in [0, 1], got {self.p}")

    @property
    def mean(self) -> float:
        return self.p

    @property
    def second_moment(self) -> float:
        return self.p

    def cdf(self, x: float) -> float:
        if x < 0:
            return 0.0
        return 1.0 - self.p if x < 1 else 1.0

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return (u < self.p).astype(np.float64)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "bernoulli", "p": self.p}

    def label(self) -> str:
        return f"bernoulli(p={self.p!r})"


Distribution = Union[Exponential, Uniform, Constant, BernoulliIndicator]

_KINDS = {
    "exponential": (Exponential, ("rate",)),
    "uniform": (Uniform, ("b",)),
    "constant": (Constant, ("c",)),
    "bernoulli": (BernoulliIndicator, ("p",)),
}


def distribution_from_json(obj: Mapping[str, Any]) -> Distribution:
    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise InvalidModel('distribution must be an object with a "kind"')
    kind = obj["kind"]
    if kind not in _KINDS:
        raise InvalidModel(f"unknown distribution kind {kind!r}; expected one of {sorted(_KINDS)}")
    cls, params = _KINDS[kind]
    extra = set(obj) - {"kind", *params}
    if extra:
        raise InvalidModel(f"unexpected fields for {kind}: {sorted(extra)}")
    try:
        return cls(**{p: float(obj[p]) for p in params if p in obj})
    except (TypeError, ValueError) as exc:
        raise InvalidModel(f"bad parameters for {kind}: {exc}") from exc


# --- models ------------------------------------------------------------------

@dataclass(frozen=True)
class WeightModel:
    """Independent per-edge weights: ``default`` everywhere except ``per_edge``."""

    default: Distribution
    per_edge: tuple[tuple[int, Distribution], ...] = ()

    @classmethod
    def homogeneous(cls, dist: Distribution) -> "WeightModel":
        return cls(dist)

    @classmethod
    def heterogeneous(cls, default: Distribution,
                      overrides: Mapping[int, Distribution]) -> "WeightModel":
        return cls(default, tuple(sorted((int(e), d) for e, d in overrides.items())))

    @classmethod
    def bernoulli(cls, probabilities: Sequence[float]) -> "WeightModel":
        """Indicator weights with edge ``e`` drawing ``1`` with probability ``probabilities[e]``."""
        if not len(probabilities):
            raise InvalidModel("need at least one probability")
        return cls.heterogeneous(BernoulliIndicator(float(probabilities[0])),
                                 {e: BernoulliIndicator(float(p))
                                  for e, p in enumerate(probabilities) if e})

    def distribution(self, e: int) -> Distribution:
        for eid, d in self.per_edge:
            if eid == e:
                return d
        return self.default

    def edge_distributions(self, m: int) -> list[Distribution]:
        out = [self.default] * m
        for eid, d in self.per_edge:
            if eid >= m:
                raise InvalidModel(f"per-edge override for edge {eid} but graph has {m} edges")
            out[eid] = d
        return out

    def _present(self, m: int | None) -> list[Distribution]:
        if m is None:
            return [self.default] + [d for _, d in self.per_edge]
        return list(dict.fromkeys(self.edge_distributions(m)))

    def cdf_lower(self, x: float, m: int | None = None) -> float:
        """``F1(x)``: a lower envelope of ``P(w(e) <= x)`` over the edges."""
        return min(d.cdf(x) for d in self._present(m))

    def cdf_upper(self, x: float, m: int | None = None) -> float:
        """``F2(x)``: an upper envelope of ``P(w(e) <= x)`` over the edges."""
        return max(d.cdf(x) for d in self._present(m))

    def label(self) -> str:
        if not self.per_edge:
            return self.default.label()
        return f"{self.default.label()}+{len(self.per_edge)}overrides"

    def to_json(self) -> dict[str, Any]:
        if not self.per_edge:
            return self.default.to_json()
        return {"default": self.default.to_json(),
                "per_edge": {str(e): d.to_json() for e, d in self.per_edge}}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "WeightModel":
        """Parse ``{"kind": ...}``, ``{"default": ..., "per_edge": {...}}`` or
        ``{"kind": "bernoulli", "p_per_edge": [...]}``."""
        if not isinstance(obj, Mapping):
            raise InvalidModel("weight model must be a JSON object")
        if obj.get("kind") == "bernoulli" and "p_per_edge" in obj:
            return cls.bernoulli(obj["p_per_edge"])
        if "default" in obj:
            overrides = obj.get("per_edge", {})
            if not isinstance(overrides, Mapping):
                raise InvalidModel('"per_edge" must map edge ids to distributions')
            try:
                parsed = {int(e): distribution_from_json(d) for e, d in overrides.items()}
            except ValueError as exc:
                raise InvalidModel(f"bad per-edge override: {exc}") from exc
            return cls.heterogeneous(distribution_from_json(obj["default"]), parsed)
        return cls(distribution_from_json(obj))


def mu_moments(model: WeightModel, m: int | None = None) -> tuple[float, float]:
    """``(mu, mu2)``: the largest per-edge first and second moments."""
    dists = model._present(m)
    mu = max(d.mean for d in dists)
    mu2 = max(d.second_moment for d in dists)
    if not (math.isfinite(mu) and math.isfinite(mu2)):
        raise UnboundedMoment("weight model has an infinite moment")
    return mu, mu2


# --- sampling ----------------------------------------------------------------

@dataclass(frozen=True)
class WeightAssignment:
    weights: tuple[float, ...]
    seed: int
    trial: int = 0

    def __getitem__(self, e: int) -> float:
        return self.weights[e]

    def __len__(self) -> int:
        return len(self.weights)


def weight_matrix(g: Graph, model: WeightModel, seed: int, trials: Iterable[int]) -> np.ndarray:
    """Weights for the given trial indices, shape ``(len(trials), m)``.

    The draw for edge ``e`` in trial ``t`` depends only on ``(seed, t, e)``.
    """
    dists = model.edge_distributions(g.m)
    t = np.asarray(list(trials), dtype=np.int64)
    e = np.arange(g.m, dtype=np.int64)
    u = keyed_uniform(seed, t[:, None], e[None, :])
    out = np.empty_like(u)
    groups: dict[Distribution, list[int]] = {}
    for eid, d in enumerate(dists):
        groups.setdefault(d, []).append(eid)
    for d, cols in groups.items():
        out[:, cols] = d.ppf(u[:, cols])
    return out


def sample_weights(g: Graph, model: WeightModel, seed: int, trial: int = 0) -> WeightAssignment:
    w = weight_matrix(g, model, seed, [trial])[0]
    return WeightAssignment(tuple(float(x) for x in w), seed, trial)


def bad_edge_count(w: WeightAssignment | Sequence[float], gamma: float) -> int:
    """Number of edges with weight at most ``gamma`` (inclusive)."""
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    weights = w.weights if isinstance(w, WeightAssignment) else w
    return sum(1 for x in weights if x <= gamma)


# --- exact M_k -----------------------------------------------------------------

class StrongMatchingInstance:
    """Conflict structure of ``(g, k)`` prepared once for repeated weighted solves."""

    def __init__(self, g: Graph, k: int, max_nodes: int | None = mis.DEFAULT_MAX_NODES):
        if g.m == 0:
            raise EmptyGraph("weighted strong matching of a graph without edges")
        self.g = g
        self.k = k
        self.max_nodes = max_nodes
        self.adj = conflict_bitsets(g, k)
        self.sizes = mis.component_sizes(self.adj, max_nodes)
        self.nu = sum(a for _, a in self.sizes)
        self._component_sets: list[list[int]] | None = None

    def solve(self, weights: Sequence[float]) -> tuple[float, Matching]:
        if len(weights) != self.g.m:
            raise InvalidModel(f"expected {self.g.m} weights, got {len(weights)}")
        if any(not (x >= 0) for x in weights):
            raise InvalidModel("weights must be nonnegative")
        chosen = mis.min_weight_maximum_independent_set(
            self.adj, [float(x) for x in weights], self.max_nodes, self.sizes)
        return math.fsum(weights[e] for e in chosen), Matching.of(chosen, self.k)

    def component_sets(self, limit: int) -> list[list[int]]:
        if self._component_sets is None:
            self._component_sets = mis.enumerate_component_sets(
                self.adj, self.sizes, limit, self.max_nodes)
        return self._component_sets


def min_weight_max_k_strong(g: Graph, w: WeightAssignment | Sequence[float], k: int,
                            max_nodes: int | None = mis.DEFAULT_MAX_NODES) -> tuple[float, Matching]:
    """``(M_k, witness)``; the witness has size ``nu_k(g)``."""
    weights = w.weights if isinstance(w, WeightAssignment) else w
    return StrongMatchingInstance(g, k, max_nodes).solve(list(weights))


def _batched_min_weights(inst: StrongMatchingInstance, w: np.ndarray,
                         comp_sets: list[list[int]]) -> np.ndarray:
    """``M_k`` per row of ``w`` by scanning every maximum set of every component."""
    trials = w.shape[0]
    picks = np.zeros((trials, inst.nu), dtype=np.int64)
    col = 0
    for sets in comp_sets:
        idx = np.array([list(mis.bits(s)) for s in sets], dtype=np.int64)
        size = idx.shape[1]
        if size == 0:
            continue
        step = max(1, 4_000_000 // (idx.size or 1))
        for start in range(0, trials, step):
            block = w[start:start + step]
            sums = block[:, idx].sum(axis=2)
            best = np.argmin(sums, axis=1)
            picks[start:start + step, col:col + size] = idx[best]
        col += size
    return np.array([math.fsum(w[t, picks[t]]) for t in range(trials)])


def m_k_samples(inst: StrongMatchingInstance, model: WeightModel, seed: int, trials: int,
                enum_limit: int = 20_000, threads: int = 1) -> np.ndarray:
    """Sampled ``M_k`` for trials ``0..trials-1``.

    Small instances enumerate all maximum k-strong matchings once and reduce
    each trial to a vectorised minimum; larger ones run branch and bound per
    trial.  Both give the same values.
    """
    out = np.empty(trials, dtype=np.float64)
    try:
        comp_sets = inst.component_sets(enum_limit)
    except mis.EnumerationLimit:
        comp_sets = None
    chunk = 2000
    for start in range(0, trials, chunk):
        rows = range(start, min(start + chunk, trials))
        w = weight_matrix(inst.g, model, seed, rows)
        if comp_sets is not None:
            out[start:start + len(rows)] = _batched_min_weights(inst, w, comp_sets)
        else:
            def one(i: int) -> float:
                return inst.solve(w[i].tolist())[0]
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    vals = list(pool.map(one, range(len(rows))))
            else:
                vals = [one(i) for i in range(len(rows))]
            out[start:start + len(rows)] = vals
    return out


# --- gamma selection ---------------------------------------------------------------

def gamma_target(max_deg: int, k: int) -> float:
    """Largest admissible ``F2(gamma)``: ``1 / (24 * Delta^(k+1))``."""
    if max_deg < 1:
        raise ValueError("maximum degree must be at least 1")
    return 1.0 / (24.0 * float(max_deg) ** (k + 1))


def select_gamma(model: WeightModel, max_deg: int, k: int, m: int | None = None,
                 refine_steps: int = 64) -> float:
    """Largest ``gamma`` with ``F2(gamma) <= 1 / (24 Delta^(k+1))``.

    Scans ``2^0, 2^-1, ..., 2^-60`` for the first feasible point, then bisects
    between it and the infeasible grid point above to push ``gamma`` up to the
    boundary.  The returned value is always feasible.
    """
    target = gamma_target(max_deg, k)

    def feasible(x: float) -> bool:
        return model.cdf_upper(x, m) <= target

    for j in range(61):
        lo = 2.0 ** -j
        if feasible(lo):
            break
    else:
        raise NoFeasibleGamma(
            f"F2(2^-60) = {model.cdf_upper(2.0 ** -60, m):.3g} exceeds {target:.3g}; "
            "the weights put too much mass near zero")
    if j == 0:
        return lo
    hi = 2.0 * lo
    for _ in range(refine_steps):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


# --- Monte Carlo statistics --------------------------------------------------------

def _mean_var(x: np.ndarray) -> tuple[float, float]:
    n = len(x)
    x0 = float(x[0])
    mean = x0 + math.fsum((x - x0).tolist()) / n
    var = math.fsum(((x - mean) ** 2).tolist()) / (n - 1)
    return mean, var


def jackknife_variance_se(x: np.ndarray) -> float:
    """Jackknife standard error of the sample variance."""
    n = len(x)
    if n < 3:
        return math.inf
    mean, var = _mean_var(x)
    ss = var * (n - 1)
    dev2 = (x - mean) ** 2
    loo = (ss - dev2 * n / (n - 1)) / (n - 2)
    loo_mean = math.fsum(loo.tolist()) / n
    jk = (n - 1) / n * math.fsum(((loo - loo_mean) ** 2).tolist())
    return math.sqrt(max(jk, 0.0))


@dataclass(frozen=True)
class WeightStats:
    """Sampled ``M_k`` summary plus verdicts against the three bounds.

    ``fitted_C`` and ``gamma2_est`` are empirical estimates for one instance,
    not derived constants.  A verdict is ``None`` when its bound does not apply
    (no feasible ``gamma``).
    """

    trials: int
    k: int
    m: int
    max_degree: int
    nu: int
    mu: float
    mu2: float
    mean_Mk: float
    var_Mk: float
    stderr_mean: float
    var_se: float
    gamma: float | None
    deviation_rate: float | None
    deviation_predicted: float | None
    deviation_stderr: float | None
    gamma2_est: float | None
    fitted_C: float
    verdicts: dict[str, bool | None] = field(default_factory=dict)

    @property
    def mean_bound(self) -> float:
        return self.mu * self.nu

    @property
    def var_bound(self) -> float:
        return 4.0 * self.mu2 * self.nu

    @property
    def var_slack(self) -> float:
        """Relative slack granted to the variance bound (3 jackknife errors)."""
        return SIGMAS * self.var_se / self.var_bound if self.var_bound > 0 else 0.0

    def passed(self) -> bool:
        return all(v is not False for v in self.verdicts.values())

    def to_json(self) -> dict[str, Any]:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["var_slack"] = self.var_slack
        return out


def weight_verdicts(*, mu: float, mu2: float, nu: int, mean: float, stderr: float,
                    var: float, var_se: float, deviation_rate: float | None,
                    deviation_predicted: float | None,
                    deviation_stderr: float | None) -> dict[str, bool | None]:
    """Verdicts recomputable from recorded statistics alone."""
    dev = None
    if deviation_rate is not None:
        dev = deviation_rate >= deviation_predicted - SIGMAS * deviation_stderr
    return {
        "mean": mean <= mu * nu + SIGMAS * stderr,
        "var": var <= 4.0 * mu2 * nu + SIGMAS * var_se,
        "dev": dev,
    }


def stats_from_samples(samples: np.ndarray, *, g: Graph, model: WeightModel, k: int,
                       nu: int) -> WeightStats:
    trials = len(samples)
    mu, mu2 = mu_moments(model, g.m)
    mean, var = _mean_var(samples)
    stderr = math.sqrt(var / trials)
    var_se = jackknife_variance_se(samples)
    delta = max_degree(g)
    gamma = rate = predicted = dev_se = gamma2 = None
    try:
        gamma = select_gamma(model, delta, k, g.m)
    except NoFeasibleGamma:
        pass
    if gamma is not None:
        hits = int(np.count_nonzero(samples >= nu * gamma / 2.0))
        rate = hits / trials
        predicted = 1.0 - 2.0 * math.exp(-g.m * model.cdf_lower(gamma, g.m) / 16.0)
        dev_se = math.sqrt(rate * (1.0 - rate) / trials)
        gamma2 = -math.log1p(-rate) / g.m if rate < 1.0 else None
    verdicts = weight_verdicts(mu=mu, mu2=mu2, nu=nu, mean=mean, stderr=stderr, var=var,
                               var_se=var_se, deviation_rate=rate,
                               deviation_predicted=predicted, deviation_stderr=dev_se)
    return WeightStats(
        trials=trials, k=k, m=g.m, max_degree=delta, nu=nu, mu=mu, mu2=mu2,
        mean_Mk=mean, var_Mk=var, stderr_mean=stderr, var_se=var_se,
        gamma=gamma, deviation_rate=rate, deviation_predicted=predicted,
        deviation_stderr=dev_se, gamma2_est=gamma2, fitted_C=mean / nu, verdicts=verdicts,
    )


def mc_weight_stats(g: Graph, model: WeightModel, k: int, trials: int, seed: int,
                    max_nodes: int | None = mis.DEFAULT_MAX_NODES,
                    enum_limit: int = 20_000, threads: int = 1) -> WeightStats:
    """Sample ``M_k`` over ``trials`` independent weight draws and check the bounds."""
    if trials < MIN_TRIALS:
        raise TooFewTrials(f"need at least {MIN_TRIALS} trials, got {trials}")
    model.edge_distributions(g.m)
    inst = StrongMatchingInstance(g, k, max_nodes)
    samples = m_k_samples(inst, model, seed, trials, enum_limit, threads)
    return stats_from_samples(samples, g=g, model=model, k=k, nu=inst.nu)
