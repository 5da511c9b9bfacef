"""Batch experiments: weight bounds, random-graph scaling, binomial tails.

Configs are JSON objects whose ``kind`` selects one of three schemas.

``weight``
    ``k``, ``seed``, ``trials``, ``model`` (a weight model), and either
    ``graph`` or ``graphs``.  A graph source is ``{"file": path}``,
    ``{"generator": {...}}`` or inline ``{"n": .., "edges": [[u, v], ...]}``,
    each with an optional ``"id"``.  Optional: ``max_nodes``, ``enum_limit``,
    ``output``, ``jsonl``.

``scaling``
    ``seed``, ``trials`` (samples per n), ``n_grid``, ``model`` (an edge
    probability model).  Optional: ``k`` (must equal the model's), ``budget``
    (largest m for an exact solve, default 60), ``sandwich_n_grid``,
    ``slope_tolerance`` (default 0.15), ``max_nodes``, ``output``, ``jsonl``.

``chernoff``
    ``seed``, ``trials`` (Monte Carlo draws), ``eps``, and ``L`` plus ``p``
    (homogeneous) or ``p_vector`` (one probability per variable).  ``L``,
    ``p`` and ``eps`` may be lists, giving one record per grid point.
    Optional: ``output``, ``jsonl``.

CSV columns per kind are frozen in ``WEIGHT_COLUMNS``, ``SCALING_COLUMNS`` and
``CHERNOFF_COLUMNS``; later additions go at the end.  Wall time is kept out of
the CSV (it only appears in JSON lines) so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from . import mis
from .errors import (
    BudgetExceeded,
    ConfigError,
    DegenerateInput,
    EpsilonOutOfRange,
    InfeasibleModel,
    StrongMatchError,
)
from .generators import graph_from_spec
from .graph import Graph, build_graph, has_isolated_edge, max_degree, neighborhood_counts
from .io import read_graph
from .matching import (
    ceil_fraction,
    degree_sum_denominator,
    greedy_k_strong,
    k1_of,
    max_k_strong_exact,
)
from .random_graphs import (
    EdgeProbModel,
    ModelDiagnostics,
    degree_sum_statistic,
    isolated_vertex_count,
    sample_graph,
    validate_model,
)
from .rng import derive_seed, keyed_uniform
from .weights import WeightModel, mc_weight_stats, weight_verdicts

ABSENT = "ABSENT"
DEFAULT_BUDGET = 60
DEFAULT_SLOPE_TOLERANCE = 0.15

WEIGHT_COLUMNS = (
    "graph_id", "k", "model", "trials", "seed", "mean", "var", "stderr", "gamma",
    "deviation_rate", "fitted_C", "verdict_mean", "verdict_var",
    "nu_k", "mu", "mu2", "var_se", "var_slack", "verdict_dev", "deviation_predicted",
    "deviation_stderr", "gamma2_est", "m", "max_degree", "error",
)
SCALING_COLUMNS = (
    "phase", "n", "trial", "seed", "m", "max_degree", "greedy_size", "exact_nu",
    "avg_stat", "avg_stat_ceil", "upper_stat", "min_d_k1", "degree_sum",
    "degree_sum_denominator", "isolated_edge", "isolated_vertices", "sandwich", "error",
)
CHERNOFF_COLUMNS = (
    "L", "p", "eps", "theta", "bound", "exact_tail", "verdict", "trials", "seed",
    "mc_tail", "mc_consistent",
)


# --- config ------------------------------------------------------------------------

_COMMON = {"kind", "seed", "trials", "output", "jsonl"}
_REQUIRED = {
    "weight": {"kind", "seed", "trials", "k", "model"},
    "scaling": {"kind", "seed", "trials", "n_grid", "model"},
    "chernoff": {"kind", "seed", "trials", "eps", "L"},
}
_ALLOWED = {
    "weight": _COMMON | {"k", "model", "graph", "graphs", "max_nodes", "enum_limit"},
    "scaling": _COMMON | {"k", "model", "n_grid", "budget", "sandwich_n_grid",
                          "slope_tolerance", "max_nodes"},
    "chernoff": _COMMON | {"L", "p", "p_vector", "eps"},
}


@dataclass(frozen=True)
class GraphSource:
    graph_id: str
    spec: Mapping[str, Any]
    base_dir: Path

    def load(self) -> Graph:
        if "file" in self.spec:
            return read_graph(self.base_dir / self.spec["file"])
        if "generator" in self.spec:
            return graph_from_spec(self.spec["generator"])
        return build_graph(int(self.spec["n"]), [tuple(e) for e in self.spec["edges"]])


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int
    trials: int
    k: int | None = None
    graphs: tuple[GraphSource, ...] = ()
    weight_model: WeightModel | None = None
    edge_model: EdgeProbModel | None = None
    n_grid: tuple[int, ...] = ()
    sandwich_n_grid: tuple[int, ...] = ()
    budget: int = DEFAULT_BUDGET
    slope_tolerance: float = DEFAULT_SLOPE_TOLERANCE
    max_nodes: int | None = mis.DEFAULT_MAX_NODES
    enum_limit: int = 20_000
    L: tuple[int, ...] = ()
    p: tuple[float, ...] = ()
    p_vector: tuple[float, ...] | None = None
    eps: tuple[float, ...] = ()
    output: Path | None = None
    jsonl: Path | None = None
    source: str | None = None

    @classmethod
    def from_json(cls, obj: Any, path: str | Path | None = None) -> "ExperimentConfig":
        src = str(path) if path is not None else None
        base = Path(path).parent if path is not None else Path(".")

        def fail(msg: str, fld: str | None = None):
            raise ConfigError(msg, field=fld, path=src)

        if not isinstance(obj, Mapping):
            fail("config must be a JSON object")
        kind = obj.get("kind")
        if kind not in _REQUIRED:
            fail(f"kind must be one of {sorted(_REQUIRED)}, got {kind!r}", "kind")
        for name in sorted(_REQUIRED[kind] - set(obj)):
            fail(f"missing required field for kind {kind!r}", name)
        for name in sorted(set(obj) - _ALLOWED[kind]):
            fail(f"field not allowed for kind {kind!r}", name)

        def integer(name: str, low: int | None = None) -> int:
            v = obj[name]
            if isinstance(v, bool) or not isinstance(v, int):
                fail(f"must be an integer, got {v!r}", name)
            if low is not None and v < low:
                fail(f"must be at least {low}, got {v}", name)
            return v

        def number(v: Any, name: str) -> float:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                fail(f"must be a number, got {v!r}", name)
            return float(v)

        def grid(name: str, conv: Callable[[Any, str], Any]) -> tuple:
            v = obj[name]
            vals = v if isinstance(v, list) else [v]
            if not vals:
                fail("must not be empty", name)
            return tuple(conv(x, name) for x in vals)

        def size_list(name: str) -> tuple[int, ...]:
            v = obj[name]
            if not isinstance(v, list) or not v:
                fail("must be a nonempty list of sizes", name)
            for x in v:
                if isinstance(x, bool) or not isinstance(x, int) or x < 2:
                    fail(f"sizes must be integers >= 2, got {x!r}", name)
            if any(a >= b for a, b in zip(v, v[1:])):
                fail("must be strictly increasing", name)
            return tuple(v)

        def out_path(name: str) -> Path | None:
            if name not in obj or obj[name] is None:
                return None
            if not isinstance(obj[name], str):
                fail("must be a path string", name)
            return base / obj[name]

        kw: dict[str, Any] = {
            "kind": kind, "seed": integer("seed", 0), "trials": integer("trials", 1),
            "output": out_path("output"), "jsonl": out_path("jsonl"), "source": src,
        }
        if "max_nodes" in obj:
            kw["max_nodes"] = None if obj["max_nodes"] is None else integer("max_nodes", 1)
        if "k" in obj:
            kw["k"] = integer("k", 0)

        if kind == "weight":
            try:
                kw["weight_model"] = WeightModel.from_json(obj["model"])
            except StrongMatchError as exc:
                fail(str(exc), "model")
            if ("graph" in obj) == ("graphs" in obj):
                fail('exactly one of "graph" or "graphs" is required', "graphs")
            raw = obj["graphs"] if "graphs" in obj else [obj["graph"]]
            if not isinstance(raw, list) or not raw:
                fail("must be a nonempty list of graph sources", "graphs")
            kw["graphs"] = tuple(_graph_source(s, i, base, fail) for i, s in enumerate(raw))
            if "enum_limit" in obj:
                kw["enum_limit"] = integer("enum_limit", 1)
        elif kind == "scaling":
            try:
                model = EdgeProbModel.from_json(obj["model"])
            except StrongMatchError as exc:
                fail(str(exc), "model")
            if "k" in obj and kw["k"] != model.k:
                fail(f"k = {kw['k']} disagrees with the model's k = {model.k}", "k")
            kw["k"] = model.k
            kw["edge_model"] = model
            kw["n_grid"] = size_list("n_grid")
            if "sandwich_n_grid" in obj:
                kw["sandwich_n_grid"] = size_list("sandwich_n_grid")
            if "budget" in obj:
                kw["budget"] = integer("budget", 0)
            if "slope_tolerance" in obj:
                tol = number(obj["slope_tolerance"], "slope_tolerance")
                if not tol > 0:
                    fail("must be positive", "slope_tolerance")
                kw["slope_tolerance"] = tol
        else:
            if ("p" in obj) == ("p_vector" in obj):
                fail('exactly one of "p" or "p_vector" is required', "p")

            def prob(x: Any, name: str) -> float:
                v = number(x, name)
                if not 0.0 <= v <= 1.0:
                    fail(f"probabilities must lie in [0, 1], got {v}", name)
                return v

            def length(x: Any, name: str) -> int:
                if isinstance(x, bool) or not isinstance(x, int) or x < 1:
                    fail(f"must be a positive integer, got {x!r}", name)
                return x

            kw["L"] = grid("L", length)
            kw["eps"] = grid("eps", number)
            if "p" in obj:
                kw["p"] = grid("p", prob)
            else:
                if not isinstance(obj["p_vector"], list):
                    fail("must be a list of probabilities", "p_vector")
                kw["p_vector"] = tuple(prob(x, "p_vector") for x in obj["p_vector"])
                if kw["L"] != (len(kw["p_vector"]),):
                    fail("L must equal the length of p_vector", "L")
        return cls(**kw)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", path=str(path)) from exc
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}", path=str(path)) from exc
        return cls.from_json(obj, path)


def _graph_source(spec: Any, i: int, base: Path, fail) -> GraphSource:
    fld = f"graphs[{i}]"
    if not isinstance(spec, Mapping):
        fail("graph source must be an object", fld)
    kinds = [key for key in ("file", "generator", "edges") if key in spec]
    if len(kinds) != 1:
        fail('graph source needs exactly one of "file", "generator", "edges"', fld)
    if kinds[0] == "edges" and "n" not in spec:
        fail('inline graph needs "n"', fld)
    if kinds[0] == "generator" and not isinstance(spec["generator"], Mapping):
        fail("generator must be an object", fld)
    if "id" in spec:
        gid = str(spec["id"])
    elif kinds[0] == "file":
        gid = Path(spec["file"]).stem
    elif kinds[0] == "generator":
        gid = "-".join(f"{v}" for _, v in sorted(spec["generator"].items(), key=lambda kv: kv[0] != "kind"))
    else:
        gid = f"graph{i}"
    return GraphSource(gid, spec, base)


# --- records -----------------------------------------------------------------------

@dataclass
class ResultRecord:
    """One CSV row plus verdicts and timing; ``row["seed"]`` reproduces it."""

    kind: str
    row: dict[str, Any]
    verdicts: dict[str, bool | None] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def seed(self) -> int:
        return self.row["seed"]

    @property
    def error(self) -> str | None:
        return self.row.get("error") or None

    def failed(self) -> bool:
        return self.error is not None or any(v is False for v in self.verdicts.values())

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, **{k: _json_value(v) for k, v in self.row.items()},
                "verdicts": self.verdicts, "wall_time": self.wall_time}


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records: Sequence[ResultRecord], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in records:
        writer.writerow([_cell(r.row.get(c)) for c in columns])
    return buf.getvalue()


def write_csv(records: Sequence[ResultRecord], columns: Sequence[str], path: str | Path) -> None:
    Path(path).write_text(records_to_csv(records, columns))


def write_jsonl(records: Sequence[ResultRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json()) + "\n")


def recompute_verdicts(record: ResultRecord) -> dict[str, bool | None]:
    """Verdicts rebuilt from the row alone, for auditing stored results."""
    row = record.row
    if record.kind == "weight":
        if row.get("error"):
            return {}
        v = weight_verdicts(mu=row["mu"], mu2=row["mu2"], nu=row["nu_k"], mean=row["mean"],
                            stderr=row["stderr"], var=row["var"], var_se=row["var_se"],
                            deviation_rate=row["deviation_rate"],
                            deviation_predicted=row["deviation_predicted"],
                            deviation_stderr=row["deviation_stderr"])
        return v
    if record.kind == "scaling":
        return {} if row["sandwich"] is None else {"sandwich": row["sandwich"]}
    if record.kind == "chernoff":
        return {"tail": row["exact_tail"] <= row["bound"]}
    raise ValueError(f"unknown record kind {record.kind!r}")


def _map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# --- weight experiments ------------------------------------------------------------

def run_weight_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRecord]:
    """One record per graph; a failing graph yields a row with ``error`` set."""
    if cfg.kind != "weight":
        raise ConfigError(f"expected a weight config, got kind {cfg.kind!r}", field="kind",
                          path=cfg.source)
    model = cfg.weight_model

    def one(item: tuple[int, GraphSource]) -> ResultRecord:
        i, src = item
        seed = derive_seed(cfg.seed, i)
        row: dict[str, Any] = {"graph_id": src.graph_id, "k": cfg.k, "model": model.label(),
                               "trials": cfg.trials, "seed": seed}
        start = time.perf_counter()
        try:
            g = src.load()
            st = mc_weight_stats(g, model, cfg.k, cfg.trials, seed, cfg.max_nodes,
                                 cfg.enum_limit)
        except (StrongMatchError, OSError, ValueError) as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
            return ResultRecord("weight", row, {}, time.perf_counter() - start)
        row.update({
            "mean": st.mean_Mk, "var": st.var_Mk, "stderr": st.stderr_mean, "gamma": st.gamma,
            "deviation_rate": st.deviation_rate, "fitted_C": st.fitted_C,
            "verdict_mean": st.verdicts["mean"], "verdict_var": st.verdicts["var"],
            "nu_k": st.nu, "mu": st.mu, "mu2": st.mu2, "var_se": st.var_se,
            "var_slack": st.var_slack, "verdict_dev": st.verdicts["dev"],
            "deviation_predicted": st.deviation_predicted,
            "deviation_stderr": st.deviation_stderr, "gamma2_est": st.gamma2_est,
            "m": st.m, "max_degree": st.max_degree, "error": None,
        })
        return ResultRecord("weight", row, dict(st.verdicts), time.perf_counter() - start)

    return _map(one, list(enumerate(cfg.graphs)), threads)


# --- power-law fits ------------------------------------------------------------------

def fit_power_law(points: Iterable[tuple[float, float]]) -> tuple[float, float, float]:
    """``(slope, intercept, r_squared)`` of least squares on ``(log n, log value)``."""
    pts = list(points)
    if len({n for n, _ in pts}) < 3:
        raise DegenerateInput(f"need at least 3 distinct n values, got {len({n for n, _ in pts})}")
    for n, v in pts:
        if not (n > 0 and v > 0 and math.isfinite(n) and math.isfinite(v)):
            raise DegenerateInput(f"power-law fit needs positive finite data, got ({n}, {v})")
    xs = [math.log(n) for n, _ in pts]
    ys = [math.log(v) for _, v in pts]
    xm = math.fsum(xs) / len(xs)
    ym = math.fsum(ys) / len(ys)
    sxx = math.fsum((x - xm) ** 2 for x in xs)
    sxy = math.fsum((x - xm) * (y - ym) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = ym - slope * xm
    sst = math.fsum((y - ym) ** 2 for y in ys)
    sse = math.fsum((y - intercept - slope * x) ** 2 for x, y in zip(xs, ys))
    r2 = 1.0 if sst == 0 else 1.0 - sse / sst
    return slope, intercept, r2


@dataclass(frozen=True)
class SlopeFit:
    statistic: str
    medians: tuple[tuple[int, float], ...]
    target: float | None
    tolerance: float | None
    slope: float | None = None
    intercept: float | None = None
    r_squared: float | None = None
    note: str | None = None

    @property
    def verdict(self) -> bool | None:
        if self.target is None:
            return None
        return self.slope is not None and abs(self.slope - self.target) <= self.tolerance

    def to_json(self) -> dict[str, Any]:
        return {
            "statistic": self.statistic,
            "medians": [[n, _json_value(v)] for n, v in self.medians],
            "target": self.target, "tolerance": self.tolerance, "slope": self.slope,
            "intercept": self.intercept, "r_squared": self.r_squared,
            "verdict": self.verdict, "note": self.note,
        }


def _slope_fit(name: str, medians: list[tuple[int, float]], target: float | None,
               tol: float | None, transform: Callable[[int, float], float] | None = None
               ) -> SlopeFit:
    pts = [(n, v) for n, v in medians if v is not None]
    try:
        if transform is None:
            slope, icpt, r2 = fit_power_law(pts)
        else:
            # exploratory: regress on log log n after removing a known power of n
            slope, icpt, r2 = fit_power_law(
                [(math.log(n), transform(n, v)) for n, v in pts])
    except DegenerateInput as exc:
        return SlopeFit(name, tuple(medians), target, tol, note=str(exc))
    return SlopeFit(name, tuple(medians), target, tol, slope, icpt, r2)


@dataclass
class ScalingResult:
    records: list[ResultRecord]
    fits: dict[str, SlopeFit]
    diagnostics: ModelDiagnostics
    verdicts: dict[str, bool | None]

    def failed(self) -> bool:
        return any(v is False for v in self.verdicts.values())

    def summary_json(self) -> dict[str, Any]:
        return {
            "diagnostics": self.diagnostics.to_json(),
            "fits": {k: f.to_json() for k, f in self.fits.items()},
            "verdicts": self.verdicts,
            "note": ("slopes check exponent consistency of the bound statistics only; "
                     "the multiplicative constants are not certified"),
        }


# --- scaling experiments -------------------------------------------------------------

def _scaling_sample(model: EdgeProbModel, phase: str, n: int, trial: int, seed: int,
                    budget: int, max_nodes: int | None) -> ResultRecord:
    k = model.k
    k1 = k1_of(k)
    start = time.perf_counter()
    row: dict[str, Any] = {"phase": phase, "n": n, "trial": trial, "seed": seed}
    try:
        g = sample_graph(model, n, seed)
        m = g.m
        d1 = neighborhood_counts(g, k1)
        low = int(d1.min())
        denom = degree_sum_denominator(g, k) if m else 0
        avg = Fraction(m * m, 4 * denom) if denom else None
        upper = float(n) / low if low else math.inf
        greedy = greedy_k_strong(g, k)[0] if m else 0
        exact: int | str = ABSENT
        if m == 0:
            exact = 0
        elif m <= budget:
            try:
                exact = max_k_strong_exact(g, k, max_nodes)[0]
            except BudgetExceeded:
                exact = ABSENT
        sandwich = None
        if exact != ABSENT:
            sandwich = (avg is None or ceil_fraction(avg) <= exact) and exact <= upper
        row.update({
            "m": m, "max_degree": max_degree(g), "greedy_size": greedy, "exact_nu": exact,
            "avg_stat": None if avg is None else float(avg),
            "avg_stat_ceil": None if avg is None else ceil_fraction(avg),
            "upper_stat": upper, "min_d_k1": low,
            "degree_sum": degree_sum_statistic(g, k), "degree_sum_denominator": denom,
            "isolated_edge": has_isolated_edge(g), "isolated_vertices": isolated_vertex_count(g),
            "sandwich": sandwich, "error": None,
        })
    except StrongMatchError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    verdicts = {} if row.get("sandwich") is None else {"sandwich": row["sandwich"]}
    return ResultRecord("scaling", row, verdicts, time.perf_counter() - start)


def _median(values: list) -> float | None:
    vals = [v for v in values if v is not None]
    return statistics.median(vals) if vals else None


def run_scaling_experiment(cfg: ExperimentConfig, threads: int = 1) -> ScalingResult:
    """Per-(n, trial) bound statistics and log-log slopes of their medians.

    Sample ``(n, trial)`` uses seed ``derive_seed(seed, n, trial)``; the
    ``sandwich`` phase reuses the same rule at the small sizes of
    ``sandwich_n_grid``.
    """
    if cfg.kind != "scaling":
        raise ConfigError(f"expected a scaling config, got kind {cfg.kind!r}", field="kind",
                          path=cfg.source)
    model = cfg.edge_model
    diags = None
    for n in cfg.n_grid + cfg.sandwich_n_grid:
        d = validate_model(model, n)
        if not d.feasible:
            raise InfeasibleModel(f"model infeasible at n = {n}: " + "; ".join(d.reasons))
        if diags is None:
            diags = d
    items = [("grid", n, t) for n in cfg.n_grid for t in range(cfg.trials)]
    items += [("sandwich", n, t) for n in cfg.sandwich_n_grid for t in range(cfg.trials)]

    def one(item: tuple[str, int, int]) -> ResultRecord:
        phase, n, t = item
        return _scaling_sample(model, phase, n, t, derive_seed(cfg.seed, n, t),
                               cfg.budget, cfg.max_nodes)

    records = _map(one, items, threads)
    records.sort(key=lambda r: (r.row["phase"] != "grid", r.row["n"], r.row["trial"]))

    grid = [r for r in records if r.row["phase"] == "grid"]
    by_n: dict[int, list[ResultRecord]] = {n: [] for n in cfg.n_grid}
    for r in grid:
        by_n[r.row["n"]].append(r)

    def medians(col: str) -> list[tuple[int, float | None]]:
        return [(n, _median([r.row.get(col) for r in rs])) for n, rs in by_n.items()]

    tol = cfg.slope_tolerance
    beta, k, delta = model.beta, model.k, model.delta_av
    # exponent of n in the conjectured growth n (log n)^a / n^(k (1 - beta + delta))
    conj_power = 1.0 - k * (1.0 - beta + delta)
    fits = {
        "avg_stat": _slope_fit("avg_stat", medians("avg_stat"), diags.theta_low, tol),
        "upper_stat": _slope_fit("upper_stat", medians("upper_stat"), diags.theta_up, tol),
        "greedy_size": _slope_fit("greedy_size", medians("greedy_size"), None, None),
        "conjecture_log_power": _slope_fit(
            "conjecture_log_power", medians("greedy_size"), None, None,
            transform=lambda n, v: math.exp(math.log(v) - conj_power * math.log(n))),
    }
    sandwich_rows = [r.row["sandwich"] for r in records if r.row.get("sandwich") is not None]
    verdicts: dict[str, bool | None] = {
        "slope_avg_stat": fits["avg_stat"].verdict,
        "slope_upper_stat": fits["upper_stat"].verdict,
        "sandwich": all(sandwich_rows) if sandwich_rows else None,
        "errors": not any(r.error for r in records),
    }
    return ScalingResult(records, fits, diags, verdicts)


# --- binomial tails ----------------------------------------------------------------

def _exact(x: float) -> Fraction:
    # the decimal a user wrote, not the nearest binary double
    return Fraction(repr(float(x)))


def binomial_tail_hits(ps: Sequence[float], eps: float) -> tuple[np.ndarray, Fraction]:
    """Boolean mask over ``t = 0..L`` of ``|t - theta| >= theta * eps``, and ``theta``."""
    theta = sum((_exact(p) for p in ps), Fraction(0))
    e = _exact(eps)
    hits = np.array([abs(t - theta) >= theta * e for t in range(len(ps) + 1)])
    return hits, theta


def sum_pmf(ps: Sequence[float]) -> np.ndarray:
    """Distribution of a sum of independent indicators with the given probabilities."""
    pmf = np.ones(1)
    for p in ps:
        pmf = np.convolve(pmf, [1.0 - p, p])
    return pmf


def exact_binomial_tail(ps: Sequence[float], eps: float) -> float:
    hits, _ = binomial_tail_hits(ps, eps)
    return math.fsum(sum_pmf(ps)[hits].tolist())


def chernoff_bound(theta: float, eps: float) -> float:
    return 2.0 * math.exp(-eps * eps * theta / 4.0)


def _chernoff_record(ps: Sequence[float], p_label: Any, eps: float, trials: int,
                     seed: int) -> ResultRecord:
    if not 0.0 < eps <= 0.5:
        raise EpsilonOutOfRange(f"eps must satisfy 0 < eps <= 1/2, got {eps}")
    start = time.perf_counter()
    L = len(ps)
    hits, theta = binomial_tail_hits(ps, eps)
    tail = math.fsum(sum_pmf(ps)[hits].tolist())
    bound = chernoff_bound(float(theta), eps)
    p = np.asarray(ps, dtype=np.float64)
    count = 0
    j = np.arange(L, dtype=np.int64)
    step = max(1, 2_000_000 // L)
    for lo in range(0, trials, step):
        t = np.arange(lo, min(lo + step, trials), dtype=np.int64)
        sums = (keyed_uniform(seed, t[:, None], j[None, :]) < p).sum(axis=1)
        count += int(hits[sums].sum())
    mc = count / trials
    spread = 4.0 * math.sqrt(tail * (1.0 - tail) / trials) + 1.0 / trials
    row = {"L": L, "p": p_label, "eps": eps, "theta": float(theta), "bound": bound,
           "exact_tail": tail, "verdict": tail <= bound, "trials": trials, "seed": seed,
           "mc_tail": mc, "mc_consistent": abs(mc - tail) <= spread}
    return ResultRecord("chernoff", row, {"tail": tail <= bound}, time.perf_counter() - start)


def run_chernoff_check(cfg: ExperimentConfig) -> ResultRecord:
    """Exact tail versus ``2 exp(-eps^2 theta / 4)`` for a single grid point."""
    if cfg.kind != "chernoff":
        raise ConfigError(f"expected a chernoff config, got kind {cfg.kind!r}", field="kind",
                          path=cfg.source)
    if len(cfg.L) != 1 or len(cfg.eps) != 1 or (cfg.p_vector is None and len(cfg.p) != 1):
        raise ConfigError("run_chernoff_check takes a single grid point; use "
                          "run_chernoff_experiment for grids", field="L", path=cfg.source)
    return run_chernoff_experiment(cfg)[0]


def run_chernoff_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRecord]:
    """One record per ``(L, p, eps)`` grid point, in grid order."""
    if cfg.kind != "chernoff":
        raise ConfigError(f"expected a chernoff config, got kind {cfg.kind!r}", field="kind",
                          path=cfg.source)
    for e in cfg.eps:
        if not 0.0 < e <= 0.5:
            raise EpsilonOutOfRange(f"eps must satisfy 0 < eps <= 1/2, got {e}")
    if cfg.p_vector is not None:
        points = [(list(cfg.p_vector), json.dumps(list(cfg.p_vector)), e) for e in cfg.eps]
    else:
        points = [([p] * L, p, e) for L in cfg.L for p in cfg.p for e in cfg.eps]

    def one(i_pt: tuple[int, tuple]) -> ResultRecord:
        i, (ps, label, e) = i_pt
        return _chernoff_record(ps, label, e, cfg.trials, derive_seed(cfg.seed, i))

    return _map(one, list(enumerate(points)), threads)
