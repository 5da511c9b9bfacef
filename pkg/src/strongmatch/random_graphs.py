"""Inhomogeneous random graphs with edge probabilities ``p(e) = h(e) / n^beta``.

Each of the ``C(n, 2)`` vertex pairs is an edge independently with its own
probability.  ``h`` comes from one of three families:

* :class:`ConstantH` - ``h(e) = h0``;
* :class:`TwoClassH` - ``h_a`` on pairs touching the first ``ceil(fraction * n)``
  vertices, ``h_b`` on the rest;
* :class:`PowerOfN` - ``h(e) = c * n^delta``.

:func:`validate_model` evaluates the growth exponents ``theta_low`` and
``theta_up`` that sandwich the k-strong matching number, and checks the
conditions on ``h`` at a concrete ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Union

import numpy as np

from .errors import EmptyVertexSet, InvalidModel, InvalidParameterOrder, ProbabilityOverflow
from .graph import Graph, build_graph, neighborhood_counts
from .matching import k1_of
from .rng import keyed_uniform

_RTOL = 1e-9


@dataclass(frozen=True)
class ConstantH:
    h0: float

    def classes(self, n: int) -> list[tuple[float, int]]:
        """``(h value, number of pairs)`` for every distinct value of ``h``."""
        return [(self.h0, n * (n - 1) // 2)]

    def row_values(self, n: int, u: int, v: np.ndarray) -> np.ndarray:
        return np.full(len(v), self.h0)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "constant", "h0": self.h0}


@dataclass(frozen=True)
class TwoClassH:
    h_a: float
    h_b: float
    fraction: float

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise InvalidModel(f"fraction must lie in [0, 1], got {self.fraction}")

    def subset_size(self, n: int) -> int:
        return min(n, math.ceil(self.fraction * n))

    def classes(self, n: int) -> list[tuple[float, int]]:
        s = self.subset_size(n)
        total = n * (n - 1) // 2
        outside = (n - s) * (n - s - 1) // 2
        return [(h, c) for h, c in ((self.h_a, total - outside), (self.h_b, outside)) if c > 0]

    def row_values(self, n: int, u: int, v: np.ndarray) -> np.ndarray:
        s = self.subset_size(n)
        if u < s:
            return np.full(len(v), self.h_a)
        return np.where(v < s, self.h_a, self.h_b)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "two_class", "h_a": self.h_a, "h_b": self.h_b, "fraction": self.fraction}


@dataclass(frozen=True)
class PowerOfN:
    c: float
    delta: float

    def value(self, n: int) -> float:
        return self.c * float(n) ** self.delta

    def classes(self, n: int) -> list[tuple[float, int]]:
        return [(self.value(n), n * (n - 1) // 2)]

    def row_values(self, n: int, u: int, v: np.ndarray) -> np.ndarray:
        return np.full(len(v), self.value(n))

    def to_json(self) -> dict[str, Any]:
        return {"kind": "power_of_n", "c": self.c, "delta": self.delta}


HSpec = Union[ConstantH, TwoClassH, PowerOfN]


def h_spec_from_json(obj: Mapping[str, Any]) -> HSpec:
    kinds = {
        "constant": (ConstantH, ("h0",)),
        "two_class": (TwoClassH, ("h_a", "h_b", "fraction")),
        "power_of_n": (PowerOfN, ("c", "delta")),
    }
    if not isinstance(obj, Mapping) or obj.get("kind") not in kinds:
        raise InvalidModel(f"h_spec.kind must be one of {sorted(kinds)}")
    cls, params = kinds[obj["kind"]]
    missing = [p for p in params if p not in obj]
    if missing:
        raise InvalidModel(f"h_spec {obj['kind']} missing {missing}")
    return cls(**{p: float(obj[p]) for p in params})


@dataclass(frozen=True)
class EdgeProbModel:
    beta: float
    h_spec: HSpec
    k: int = 3
    gamma0: float = 1.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    delta_low: float = 0.0
    delta_av: float = 0.0
    delta_up: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise InvalidModel(f"beta must lie in (0, 1), got {self.beta}")
        if self.k < 3:
            raise InvalidModel(f"k must be at least 3, got {self.k}")
        for name in ("gamma0", "gamma1", "gamma2"):
            if not getattr(self, name) > 0:
                raise InvalidModel(f"{name} must be positive")

    def scale(self, n: int) -> float:
        return float(n) ** self.beta

    def to_json(self) -> dict[str, Any]:
        return {
            "beta": self.beta, "k": self.k, "h_spec": self.h_spec.to_json(),
            "gamma0": self.gamma0, "gamma1": self.gamma1, "gamma2": self.gamma2,
            "delta_low": self.delta_low, "delta_av": self.delta_av, "delta_up": self.delta_up,
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "EdgeProbModel":
        if not isinstance(obj, Mapping):
            raise InvalidModel("model must be a JSON object")
        for req in ("beta", "h_spec"):
            if req not in obj:
                raise InvalidModel(f"model missing {req!r}")
        known = {"beta", "k", "h_spec", "gamma0", "gamma1", "gamma2",
                 "delta_low", "delta_av", "delta_up"}
        extra = set(obj) - known
        if extra:
            raise InvalidModel(f"unexpected model fields {sorted(extra)}")
        kw = {key: float(obj[key]) for key in known - {"k", "h_spec"} if key in obj}
        if "k" in obj:
            kw["k"] = int(obj["k"])
        return cls(h_spec=h_spec_from_json(obj["h_spec"]), **kw)


@dataclass(frozen=True)
class ModelDiagnostics:
    n: int
    k: int
    k1: int
    theta_low: float
    theta_up: float
    p_low: float
    p_up: float
    h_min: float
    h_max: float
    h_power_mean: float
    max_p: float
    feasible: bool
    reasons: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> dict[str, Any]:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["reasons"] = list(self.reasons)
        return out


def _leq(a: float, b: float) -> bool:
    return a <= b + _RTOL * max(abs(a), abs(b), 1.0)


def validate_model(model: EdgeProbModel, n: int) -> ModelDiagnostics:
    """Exponents, ``k1``, ``p_low``/``p_up`` and the feasibility checks at ``n``.

    Raises :class:`InvalidParameterOrder` unless
    ``0 <= delta_low <= delta_av <= delta_up < beta`` and
    :class:`ProbabilityOverflow` if some ``p(e) > 1``.  Every other failed
    condition makes the model infeasible and is listed in ``reasons``.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    b, k = model.beta, model.k
    dl, da, du = model.delta_low, model.delta_av, model.delta_up
    if not (0.0 <= dl <= da <= du < b):
        raise InvalidParameterOrder(
            f"need 0 <= delta_low <= delta_av <= delta_up < beta, got "
            f"{dl}, {da}, {du}, beta={b}")
    classes = model.h_spec.classes(n)
    h_min = min(h for h, _ in classes)
    h_max = max(h for h, _ in classes)
    max_p = h_max / model.scale(n)
    if max_p > 1.0:
        raise ProbabilityOverflow(f"p(e) = {max_p:.6g} > 1 at n = {n}")
    pairs = n * (n - 1) // 2
    power_mean = math.fsum(h ** (k + 2) * c for h, c in classes) / pairs

    k1 = k1_of(k)
    theta_low = 1.0 - k * (1.0 - b + da) - 2.0 * (da - dl)
    theta_up = 1.0 - k1 * (1.0 - b + dl)
    reasons = []
    if not theta_low > 0:
        reasons.append(f"theta_low = {theta_low:.6g} is not positive")
    if not k1 * (1.0 - b + du) < 1:
        reasons.append(f"k1 * (1 - beta + delta_up) = {k1 * (1.0 - b + du):.6g} is not below 1")
    lo = model.gamma1 * float(n) ** dl
    hi = model.gamma2 * float(n) ** du
    if not _leq(lo, h_min):
        reasons.append(f"min h = {h_min:.6g} below gamma1 * n^delta_low = {lo:.6g}")
    if not _leq(h_max, hi):
        reasons.append(f"max h = {h_max:.6g} above gamma2 * n^delta_up = {hi:.6g}")
    avg_cap = model.gamma0 * float(n) ** ((k + 2) * da)
    if not _leq(power_mean, avg_cap):
        reasons.append(f"mean h^(k+2) = {power_mean:.6g} above gamma0 * n^((k+2) delta_av) = {avg_cap:.6g}")
    return ModelDiagnostics(
        n=n, k=k, k1=k1, theta_low=theta_low, theta_up=theta_up,
        p_low=model.gamma1 / float(n) ** (b - dl),
        p_up=model.gamma2 / float(n) ** (b - du),
        h_min=h_min, h_max=h_max, h_power_mean=power_mean, max_p=max_p,
        feasible=not reasons, reasons=tuple(reasons),
    )


def sample_graph(model: EdgeProbModel, n: int, seed: int) -> Graph:
    """Draw one graph; pair ``(u, v)`` uses the uniform keyed by ``(seed, u, v)``."""
    scale = model.scale(n)
    if n >= 2 and max(h for h, _ in model.h_spec.classes(n)) / scale > 1.0:
        raise ProbabilityOverflow(f"some p(e) exceeds 1 at n = {n}")
    pairs = []
    for u in range(n - 1):
        v = np.arange(u + 1, n, dtype=np.int64)
        p = model.h_spec.row_values(n, u, v) / scale
        hit = v[keyed_uniform(seed, u, v) < p]
        pairs.extend((u, int(x)) for x in hit)
    return build_graph(n, pairs)


@dataclass(frozen=True)
class ExplorationRecord:
    source: int
    layer_sizes: tuple[int, ...]
    cumulative: tuple[int, ...]


def exploration_layers(g: Graph, source: int, depth: int) -> ExplorationRecord:
    """Sizes of the BFS layers ``S_0 .. S_depth`` around ``source``."""
    if depth < 0:
        raise ValueError(f"depth must be nonnegative, got {depth}")
    g._check_vertex(source)
    sizes = [1]
    seen = {source}
    frontier = [source]
    for _ in range(depth):
        nxt = []
        for x in frontier:
            for y, _ in g.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        sizes.append(len(nxt))
        frontier = nxt
    return ExplorationRecord(source, tuple(sizes), tuple(int(c) for c in np.cumsum(sizes)))


def degree_sum_statistic(g: Graph, k: int) -> int:
    """``sum_u d_1(u) * d_{k+1}(u)``."""
    d1 = g.degrees()
    if not d1.any():
        return 0
    return int(np.dot(d1, neighborhood_counts(g, k + 1)))


def min_neighborhood(g: Graph, radius: int) -> int:
    """``min_u d_radius(u)``."""
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    if g.n == 0:
        raise EmptyVertexSet("graph has no vertices")
    return int(neighborhood_counts(g, radius).min())


def isolated_vertex_count(g: Graph) -> int:
    return int(np.count_nonzero(g.degrees() == 0))
