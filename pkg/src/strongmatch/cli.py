"""Command-line front end.

Exit codes: 0 success, 1 a bound check failed (or a record carries an error
marker), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import mis
from .errors import ConfigError, StrongMatchError
from .experiments import (
    CHERNOFF_COLUMNS,
    SCALING_COLUMNS,
    WEIGHT_COLUMNS,
    ExperimentConfig,
    records_to_csv,
    run_chernoff_experiment,
    run_scaling_experiment,
    run_weight_experiment,
    write_jsonl,
)
from .generators import graph_from_spec
from .graph import Graph
from .io import graph_to_json, read_graph, write_graph
from .matching import bounds_report, greedy_k_strong, max_k_strong_exact
from .random_graphs import EdgeProbModel, sample_graph, validate_model
from .weights import WeightModel, min_weight_max_k_strong, sample_weights


def _json_arg(text: str, what: str) -> Any:
    """Inline JSON if it looks like an object, otherwise a file path."""
    if text.lstrip().startswith("{"):
        src = text
    else:
        try:
            src = Path(text).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {what} file: {exc.strerror}", path=text) from exc
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid {what} JSON: {exc}", path=None if src is text else text) from exc


def _emit(obj: Any) -> None:
    print(json.dumps(obj, indent=2))


def _load_graph(path: str) -> Graph:
    try:
        return read_graph(path)
    except OSError as exc:
        raise ConfigError(f"cannot read graph: {exc.strerror}", path=path) from exc


def cmd_gen(args) -> int:
    if (args.model is None) == (args.generator is None):
        raise ConfigError("give exactly one of --model or --generator")
    if args.model is not None:
        if args.n is None:
            raise ConfigError("--n is required with --model", field="n")
        g = sample_graph(EdgeProbModel.from_json(_json_arg(args.model, "model")), args.n, args.seed)
    else:
        g = graph_from_spec(_json_arg(args.generator, "generator"))
    if args.out:
        write_graph(g, args.out)
    else:
        _emit(graph_to_json(g))
    return 0


def cmd_solve(args) -> int:
    g = _load_graph(args.graph)
    if args.greedy:
        size, mt = greedy_k_strong(g, args.k)
    else:
        size, mt = max_k_strong_exact(g, args.k, args.max_nodes)
    ids = mt.sorted_ids()
    _emit({"k": args.k, "method": "greedy" if args.greedy else "exact", "size": size,
           "edge_ids": ids, "edges": [list(g.edges[e]) for e in ids]})
    return 0


def cmd_bounds(args) -> int:
    _emit(bounds_report(_load_graph(args.graph), args.k).to_json())
    return 0


def cmd_mweight(args) -> int:
    g = _load_graph(args.graph)
    if args.weights is not None:
        weights = [float(x) for x in _json_arg(args.weights, "weights")["weights"]] \
            if args.weights.lstrip().startswith("{") else [float(x) for x in args.weights.split(",")]
    else:
        model = WeightModel.from_json(_json_arg(args.model, "model"))
        weights = list(sample_weights(g, model, args.seed, args.trial).weights)
    value, mt = min_weight_max_k_strong(g, weights, args.k, args.max_nodes)
    _emit({"k": args.k, "M_k": value, "nu_k": mt.size, "edge_ids": mt.sorted_ids(),
           "weights": weights})
    return 0


def _write_records(records, columns, out: Path | None, jsonl: Path | None) -> None:
    text = records_to_csv(records, columns)
    if out is not None:
        out.write_text(text)
    else:
        sys.stdout.write(text)
    if jsonl is not None:
        write_jsonl(records, jsonl)


def _report(lines: list[str], to_stdout: bool) -> None:
    stream = sys.stdout if to_stdout else sys.stderr
    for line in lines:
        print(line, file=stream)


def _paths(args, cfg: ExperimentConfig) -> tuple[Path | None, Path | None]:
    out = Path(args.out) if args.out else cfg.output
    jsonl = Path(args.jsonl) if args.jsonl else cfg.jsonl
    return out, jsonl


def _expect(cfg: ExperimentConfig, kind: str, path: str) -> None:
    if cfg.kind != kind:
        raise ConfigError(f"this command runs {kind!r} configs, got {cfg.kind!r}",
                          field="kind", path=path)


def cmd_exp_weight(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    _expect(cfg, "weight", args.config)
    records = run_weight_experiment(cfg, args.threads)
    out, jsonl = _paths(args, cfg)
    _write_records(records, WEIGHT_COLUMNS, out, jsonl)
    lines = []
    for r in records:
        status = "ERROR " + r.error if r.error else \
            " ".join(f"{k}={'n/a' if v is None else ('pass' if v else 'FAIL')}"
                     for k, v in r.verdicts.items())
        lines.append(f"{r.row['graph_id']}: {status}")
    _report(lines, out is not None)
    return 1 if any(r.failed() for r in records) else 0


def cmd_exp_scaling(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    _expect(cfg, "scaling", args.config)
    res = run_scaling_experiment(cfg, args.threads)
    out, jsonl = _paths(args, cfg)
    _write_records(res.records, SCALING_COLUMNS, out, jsonl)
    summary = json.dumps(res.summary_json(), indent=2)
    if out is not None:
        out.with_name(out.name + ".fits.json").write_text(summary + "\n")
    _report([summary], out is not None)
    return 1 if res.failed() else 0


def cmd_exp_chernoff(args) -> int:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
        _expect(cfg, "chernoff", args.config)
    else:
        missing = [f for f in ("L", "p", "eps") if getattr(args, f) is None]
        if missing:
            raise ConfigError("need --config or all of --L, --p, --eps", field=missing[0])
        cfg = ExperimentConfig.from_json({"kind": "chernoff", "L": args.L, "p": args.p,
                                          "eps": args.eps, "trials": args.trials,
                                          "seed": args.seed})
    records = run_chernoff_experiment(cfg, args.threads)
    out, jsonl = _paths(args, cfg)
    _write_records(records, CHERNOFF_COLUMNS, out, jsonl)
    lines = [f"L={r.row['L']} p={r.row['p']} eps={r.row['eps']}: tail={r.row['exact_tail']:.6g} "
             f"bound={r.row['bound']:.6g} {'pass' if r.row['verdict'] else 'FAIL'}"
             for r in records]
    _report(lines, out is not None)
    return 1 if any(r.failed() for r in records) else 0


def cmd_validate_model(args) -> int:
    model = EdgeProbModel.from_json(_json_arg(args.model, "model"))
    diags = [validate_model(model, n) for n in args.n]
    _emit([d.to_json() for d in diags])
    return 0 if all(d.feasible for d in diags) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="strongmatch",
                                description="k-strong matchings: exact solver, bounds, experiments")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample or construct a graph and save it")
    g.add_argument("--model", help="edge probability model (JSON file or inline JSON)")
    g.add_argument("--generator", help='generator spec, e.g. \'{"kind": "cycle", "n": 6}\'')
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output path (.json or edge list); stdout if omitted")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="k-strong matching number and a witness")
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--greedy", action="store_true", help="polynomial greedy instead of exact")
    s.add_argument("--max-nodes", type=int, default=mis.DEFAULT_MAX_NODES)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bounds", help="neighbourhood bounds on the k-strong matching number")
    b.add_argument("--graph", required=True)
    b.add_argument("--k", type=int, required=True)
    b.set_defaults(func=cmd_bounds)

    w = sub.add_parser("mweight", help="minimum weight of a maximum k-strong matching")
    w.add_argument("--graph", required=True)
    w.add_argument("--k", type=int, required=True)
    src = w.add_mutually_exclusive_group(required=True)
    src.add_argument("--weights", help="comma-separated weights by EdgeId")
    src.add_argument("--model", help="weight model to sample from (JSON file or inline)")
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--trial", type=int, default=0)
    w.add_argument("--max-nodes", type=int, default=mis.DEFAULT_MAX_NODES)
    w.set_defaults(func=cmd_mweight)

    for name, func, help_ in (("exp-weight", cmd_exp_weight, "run a weight experiment config"),
                              ("exp-scaling", cmd_exp_scaling, "run a scaling experiment config")):
        e = sub.add_parser(name, help=help_)
        e.add_argument("--config", required=True)
        e.add_argument("--out", help="CSV path (overrides the config)")
        e.add_argument("--jsonl", help="JSON lines path with wall times")
        e.add_argument("--threads", type=int, default=1)
        e.set_defaults(func=func)

    c = sub.add_parser("exp-chernoff", help="exact binomial tails against the exponential bound")
    c.add_argument("--config")
    c.add_argument("--L", type=int)
    c.add_argument("--p", type=float)
    c.add_argument("--eps", type=float)
    c.add_argument("--trials", type=int, default=10_000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.add_argument("--jsonl")
    c.add_argument("--threads", type=int, default=1)
    c.set_defaults(func=cmd_exp_chernoff)

    v = sub.add_parser("validate-model", help="growth exponents and feasibility of an edge model")
    v.add_argument("--model", required=True)
    v.add_argument("--n", type=int, nargs="+", required=True)
    v.set_defaults(func=cmd_validate_model)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (StrongMatchError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
