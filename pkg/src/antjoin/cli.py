"""Command-line interface.

    antjoin gen --tables 8 --topology chain --seed 7 > q.json
    antjoin optimize q.json --algo aco --seed 42
    antjoin sql q.json --algo dp
    antjoin bench --config configs/paper_repro.json

Exit codes: 0 success, 1 domain or validation error, 2 usage error.
Settings resolve as flags > config file > defaults; ``ANTJOIN_SEED`` supplies
the seed when neither a flag nor the config file does.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from . import aco, baselines, bench
from .errors import AntJoinError, ConfigError
from .query_model import JoinOrder, QueryGraph, parse_graph, render_graph, validate_order
from .workload_gen import TOPOLOGIES, WorkloadSpec, generate

ALGOS = ("aco", "dp", "exhaustive", "greedy", "random", "sa")

_WORKLOAD_FLAGS = {
    "tables": "num_tables",
    "topology": "topology",
    "card_min": "card_min",
    "card_max": "card_max",
    "sel_min": "sel_min",
    "sel_max": "sel_max",
}
_ACO_FLAGS = {"ants": "num_ants", "beta": "beta", "rho": "rho", "q0": "q0", "iterations": "iterations"}


class UsageError(Exception):
    pass


# --- config document ---------------------------------------------------------


def _check_keys(section: str, doc: dict, allowed) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"config section {section!r} must be an object")
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) in config section {section!r}: {', '.join(extra)}")


def _names(cls) -> list[str]:
    return [f.name for f in fields(cls)]


def load_config(path: str | None) -> dict:
    """Read a config document (JSON); a missing path yields an empty config."""
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    _check_keys("<root>", doc, ("seed", "workload", "aco", "sa", "bench"))
    _check_keys("workload", doc.get("workload", {}), _names(WorkloadSpec))
    _check_keys("aco", doc.get("aco", {}), _names(aco.AcoParams))
    _check_keys("sa", doc.get("sa", {}), _names(baselines.SAParams))
    _check_keys(
        "bench",
        doc.get("bench", {}),
        (
            "scenarios",
            "algorithms",
            "runs",
            "ant_policy",
            "ant_count_sweep",
            "output",
            "trace",
            "workers",
            "record_timing",
        ),
    )
    for i, sc in enumerate(doc.get("bench", {}).get("scenarios", [])):
        _check_keys(f"bench.scenarios[{i}]", sc, _names(WorkloadSpec))
    return doc


def resolve_seed(flag: int | None, cfg: dict) -> int:
    if flag is not None:
        return flag
    if "seed" in cfg:
        return int(cfg["seed"])
    env = os.environ.get("ANTJOIN_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"ANTJOIN_SEED must be an integer, got {env!r}") from None
    return 0


def _overrides(args: argparse.Namespace, mapping: dict[str, str]) -> dict:
    return {field: getattr(args, flag) for flag, field in mapping.items() if getattr(args, flag, None) is not None}


def workload_from(args: argparse.Namespace, cfg: dict) -> WorkloadSpec:
    values = dict(cfg.get("workload", {}))
    values.update(_overrides(args, _WORKLOAD_FLAGS))
    values["seed"] = args.seed if args.seed is not None else values.get("seed", resolve_seed(None, cfg))
    return WorkloadSpec(**values)


def aco_params_from(args: argparse.Namespace, cfg: dict, seed: int) -> aco.AcoParams:
    values = dict(cfg.get("aco", {}))
    values.update(_overrides(args, _ACO_FLAGS))
    if getattr(args, "parallel", False):
        values["parallel"] = True
    values["seed"] = seed
    return aco.AcoParams(**values)


def sa_params_from(cfg: dict) -> baselines.SAParams | None:
    return baselines.SAParams(**cfg["sa"]) if "sa" in cfg else None


def bench_config_from(args: argparse.Namespace, cfg: dict) -> tuple[bench.BenchConfig, bool]:
    b = cfg.get("bench", {})
    seed = resolve_seed(args.seed, cfg)
    if b.get("scenarios") is not None:
        scenarios = [WorkloadSpec(**sc) for sc in b["scenarios"]]
        if any(getattr(args, f) is not None for f in _WORKLOAD_FLAGS):
            scenarios = [replace(sc, **_overrides(args, _WORKLOAD_FLAGS)) for sc in scenarios]
    elif args.tables is not None or "workload" in cfg:
        scenarios = [workload_from(args, cfg)]
    else:
        scenarios = []
    if not scenarios:
        raise UsageError("bench needs at least one scenario (config bench.scenarios or --tables)")

    policy = args.ant_policy or b.get("ant_policy", "equal_to_tables")
    sweep = bool(b.get("ant_count_sweep", False))
    if policy == "sweep":
        policy, sweep = "equal_to_tables", True
    workers = 1 if args.serial else (args.workers or b.get("workers") or os.cpu_count() or 1)
    out = args.out or b.get("output") or "results.csv"
    trace = args.trace or b.get("trace")
    algorithms = args.algo.split(",") if args.algo else b.get("algorithms", ["aco", "greedy", "random"])
    runs = args.runs if args.runs is not None else b.get("runs", 20)
    record_timing = b.get("record_timing", True) and not args.no_timing
    return (
        bench.BenchConfig(
            scenarios=scenarios,
            algorithms=algorithms,
            runs=runs,
            aco_params=aco_params_from(args, cfg, seed),
            ant_policy=policy,
            sa_params=sa_params_from(cfg),
            seed=seed,
            output_path=out,
            trace_path=trace,
            workers=workers,
            record_timing=record_timing,
        ),
        sweep,
    )


# --- algorithms and rendering --------------------------------------------------


def solve(g: QueryGraph, algo: str, params: aco.AcoParams, sa: baselines.SAParams | None = None):
    """Run one optimizer; returns ``(order, cost, evaluations, elapsed_s, trace)``."""
    if algo == "aco":
        r = aco.optimize(g, params)
        return r.best_order, r.best_cost, r.evaluations, r.elapsed, r.trace
    rng = np.random.default_rng(params.seed)
    budget = params.ants_for(g.n) * params.iterations
    if algo == "dp":
        r = baselines.dp_optimal(g)
    elif algo == "exhaustive":
        r = baselines.exhaustive(g)
    elif algo == "greedy":
        walks = [baselines.greedy_nn(g, s) for s in range(g.n)]
        r = min(walks, key=lambda w: w.cost.total)
    elif algo == "random":
        r = baselines.random_sample(g, budget, rng)
    elif algo == "sa":
        r = baselines.simulated_annealing(g, sa or baselines.SAParams(steps=max(budget - 1, 1)), rng)
    else:
        raise ConfigError(f"unknown algorithm {algo!r}")
    return r.order, r.cost, r.evaluations, r.elapsed, None


def _fmt(x: float) -> str:
    return repr(float(x))


def plan_report(g: QueryGraph, algo: str, order: JoinOrder, cost, evaluations: int, elapsed: float) -> str:
    lines = [
        f"algorithm: {algo}",
        f"order: {' -> '.join(order.names(g))}",
        f"steps: {' '.join(_fmt(s) for s in cost.steps)}",
        f"total_cost: {_fmt(cost.total)}",
        f"evaluations: {evaluations}",
        f"elapsed_ms: {elapsed * 1000:.3f}",
    ]
    return "\n".join(lines) + "\n"


_PLAIN_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _ident(name: str) -> str:
    if _PLAIN_IDENT.match(name):
        return name
    return '"' + name.replace('"', '""') + '"'


def render_sql(g: QueryGraph, order: JoinOrder) -> str:
    """Left-deep SELECT in the given order.  Join keys are placeholders (``key``)."""
    validate_order(g, order)
    names = [_ident(n) for n in g.names]
    seq = order.sequence
    lines = ["-- join predicates use placeholder key columns; complete them by hand", "SELECT *", f"FROM {names[seq[0]]}"]
    for k in range(1, len(seq)):
        t = seq[k]
        linked = [p for p in sorted(seq[:k]) if g.has_edge(p, t)]
        if linked:
            on = " AND ".join(f"{names[p]}.key = {names[t]}.key" for p in linked)
            lines.append(f"  INNER JOIN {names[t]} ON {on}")
        else:
            lines.append(f"  CROSS JOIN {names[t]}")
    return "\n".join(lines) + ";\n"


# --- commands ----------------------------------------------------------------


def _write(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_graph(path: str | None) -> QueryGraph:
    if not path or path == "-":
        return parse_graph(sys.stdin.read())
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    g = generate(workload_from(args, cfg))
    _write(render_graph(g), args.out)
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    g = _read_graph(args.graph)
    params = aco_params_from(args, cfg, resolve_seed(args.seed, cfg))
    order, cost, evals, elapsed, trace = solve(g, args.algo, params, sa_params_from(cfg))
    _write(plan_report(g, args.algo, order, cost, evals, elapsed), args.out)
    if args.trace:
        if trace is None:
            print(f"warning: --trace applies to aco only; {args.algo} has no convergence trace", file=sys.stderr)
        else:
            bench.emit_trace_csv([(0, 0, trace)], args.trace)
    return 0


def cmd_sql(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    g = _read_graph(args.graph)
    if args.order:
        try:
            order = JoinOrder(g.index_of(name.strip()) for name in args.order.split(","))
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
    else:
        params = aco_params_from(args, cfg, resolve_seed(args.seed, cfg))
        order = solve(g, args.algo or "aco", params, sa_params_from(cfg))[0]
    _write(render_sql(g, order), args.out)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    bcfg, sweep = bench_config_from(args, cfg)
    records = bench.ant_count_sweep(bcfg) if sweep else bench.run_benchmark(bcfg)
    for row in bench.summarize(records):
        print(
            f"n={row['num_tables']:<3} {row['algorithm']:<10} {row['ant_policy']:<16} runs={row['runs']:<3} "
            f"mean_cost={row['mean_best_cost']:.6g} median_ms={row['median_elapsed_ms']:.3f} "
            f"mean_evals={row['mean_evaluations']:.1f}"
        )
    print(f"{len(records)} records written to {bcfg.output_path}")
    return 0


# --- parser ------------------------------------------------------------------


def _add_workload_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tables", type=int, help="number of tables")
    p.add_argument("--topology", choices=TOPOLOGIES)
    p.add_argument("--card-min", type=int)
    p.add_argument("--card-max", type=int)
    p.add_argument("--sel-min", type=float)
    p.add_argument("--sel-max", type=float)


def _add_aco_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ants", type=int, help="ants per iteration (default: one per table)")
    p.add_argument("--beta", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--q0", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--parallel", action="store_true", help="batched parallel ant construction")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="random seed (default: $ANTJOIN_SEED or 0)")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="antjoin", description="Join ordering with an ant colony system.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a random query graph")
    _add_workload_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("optimize", parents=[common], help="find a join order for a query graph")
    p.add_argument("graph", nargs="?", help="graph JSON file (default: stdin)")
    p.add_argument("--algo", choices=ALGOS, default="aco")
    p.add_argument("--trace", help="write the convergence CSV here (aco only)")
    _add_aco_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sql", parents=[common], help="emit SQL for a join order")
    p.add_argument("graph", nargs="?", help="graph JSON file (default: stdin)")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--algo", choices=ALGOS)
    src.add_argument("--order", help="explicit order as comma-separated table names")
    _add_aco_flags(p)
    p.set_defaults(func=cmd_sql)

    p = sub.add_parser("bench", parents=[common], help="run a benchmark sweep")
    _add_workload_flags(p)
    _add_aco_flags(p)
    p.add_argument("--algo", help="comma-separated algorithms")
    p.add_argument("--runs", type=int)
    p.add_argument("--ant-policy", help="equal_to_tables, half_tables, fixed:K or sweep")
    p.add_argument("--trace", help="convergence CSV path")
    p.add_argument("--serial", action="store_true", help="run cells one at a time (cleaner timings)")
    p.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    p.add_argument("--no-timing", action="store_true", help="write elapsed_ms as 0 for byte-stable output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (AntJoinError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
