"""Experiment harness: table-count sweeps, repeated runs, algorithm comparison.

Every (scenario, run) cell gets a fresh graph and its own seed, both derived
from the configuration alone, so a benchmark is reproducible from its config.
Cells can be farmed out to worker processes; records are always merged back
in (scenario, algorithm, run) order.  Timings taken while other cells run
concurrently are noisier, so use ``workers=1`` for numbers worth publishing.
"""

from __future__ import annotations

import csv
import math
import statistics
import warnings
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import aco, baselines
from .errors import ConfigError, TooLarge
from .query_model import QueryGraph
from .workload_gen import WorkloadSpec, generate

__all__ = [
    "ALGORITHMS",
    "ANT_POLICIES",
    "RESULT_COLUMNS",
    "TRACE_COLUMNS",
    "BenchConfig",
    "BenchRecord",
    "GuardSkipWarning",
    "derive_seed",
    "ants_for_policy",
    "run_benchmark",
    "ant_count_sweep",
    "summarize",
    "emit_csv",
    "emit_trace_csv",
]

ALGORITHMS = ("aco", "exhaustive", "dp", "greedy", "random", "sa")
ANT_POLICIES = ("equal_to_tables", "half_tables", "fixed")
RESULT_COLUMNS = (
    "algorithm",
    "ant_policy",
    "num_tables",
    "topology",
    "run",
    "seed",
    "best_cost",
    "elapsed_ms",
    "evaluations",
)
TRACE_COLUMNS = ("scenario", "run", "iteration", "best_so_far")

GUARDS = {"exhaustive": baselines.EXHAUSTIVE_LIMIT, "dp": baselines.DP_LIMIT}


class GuardSkipWarning(UserWarning):
    """An exact algorithm was skipped because the scenario exceeds its size guard."""


@dataclass(frozen=True)
class BenchConfig:
    scenarios: tuple[WorkloadSpec, ...]
    algorithms: tuple[str, ...] = ("aco", "greedy", "random")
    runs: int = 20
    aco_params: aco.AcoParams = field(default_factory=aco.AcoParams)
    ant_policy: str = "equal_to_tables"  # or "half_tables", "fixed:K"
    sa_params: baselines.SAParams | None = None  # None: steps matched to the ACO budget
    seed: int = 0
    output_path: str | None = None
    trace_path: str | None = None
    workers: int = 1
    record_timing: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not self.scenarios:
            raise ConfigError("at least one scenario is required")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"unknown algorithm(s) {unknown}; expected a subset of {list(ALGORITHMS)}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        ants_for_policy(self.ant_policy, 2)


@dataclass(frozen=True)
class BenchRecord:
    algorithm: str
    ant_policy: str
    num_tables: int
    topology: str
    run: int
    seed: int
    best_cost: float
    elapsed_ms: float
    evaluations: int
    scenario: int = 0
    trace: tuple[float, ...] = ()

    def row(self, timing: bool = True) -> list[str]:
        return [
            self.algorithm,
            self.ant_policy,
            str(self.num_tables),
            self.topology,
            str(self.run),
            str(self.seed),
            repr(float(self.best_cost)),
            f"{self.elapsed_ms if timing else 0.0:.3f}",
            str(self.evaluations),
        ]


def derive_seed(*keys: int) -> int:
    """A 64-bit seed determined by ``keys`` alone."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, np.uint64)[0])


def ants_for_policy(policy: str, n: int) -> int:
    if policy == "equal_to_tables":
        return n
    if policy == "half_tables":
        return math.ceil(n / 2)
    if policy.startswith("fixed:"):
        try:
            k = int(policy.split(":", 1)[1])
        except ValueError:
            k = 0
        if k >= 1:
            return k
    raise ConfigError(f"unknown ant policy {policy!r}; expected equal_to_tables, half_tables or fixed:K")


@dataclass(frozen=True)
class _Cell:
    scenario: int
    spec: WorkloadSpec
    run: int
    seed: int
    algorithm: str
    ant_policy: str
    aco_params: aco.AcoParams
    sa_params: baselines.SAParams | None


def _run_cell(cell: _Cell, g: QueryGraph | None = None) -> BenchRecord:
    g = g if g is not None else generate(cell.spec)
    n = g.n
    ants = ants_for_policy(cell.ant_policy, n)
    budget = ants * cell.aco_params.iterations
    rng = np.random.default_rng(cell.seed)
    trace: tuple[float, ...] = ()
    if cell.algorithm == "aco":
        res = aco.optimize(g, replace(cell.aco_params, num_ants=ants, seed=cell.seed))
        cost, evals, elapsed, trace = res.best_cost.total, res.evaluations, res.elapsed, res.trace
    else:
        if cell.algorithm == "exhaustive":
            r = baselines.exhaustive(g)
        elif cell.algorithm == "dp":
            r = baselines.dp_optimal(g)
        elif cell.algorithm == "greedy":
            # best greedy walk over all start tables
            walks = [baselines.greedy_nn(g, s) for s in range(n)]
            r = min(walks, key=lambda w: w.cost.total)
            r = replace(r, evaluations=n, elapsed=sum(w.elapsed for w in walks))
        elif cell.algorithm == "random":
            r = baselines.random_sample(g, budget, rng)
        else:
            sa = cell.sa_params or baselines.SAParams(steps=max(budget - 1, 1))
            r = baselines.simulated_annealing(g, sa, rng)
        cost, evals, elapsed = r.cost.total, r.evaluations, r.elapsed
    return BenchRecord(
        algorithm=cell.algorithm,
        ant_policy=cell.ant_policy,
        num_tables=n,
        topology=cell.spec.topology,
        run=cell.run,
        seed=cell.seed,
        best_cost=cost,
        elapsed_ms=elapsed * 1000.0,
        evaluations=evals,
        scenario=cell.scenario,
        trace=tuple(trace),
    )


def _run_group(cells: Sequence[_Cell]) -> list[BenchRecord]:
    # all cells of a group share one graph
    g = generate(cells[0].spec)
    return [_run_cell(c, g) for c in cells]


def _plan(cfg: BenchConfig) -> list[list[_Cell]]:
    groups = []
    for si, spec in enumerate(cfg.scenarios):
        for run in range(cfg.runs):
            graph_spec = spec.with_seed(derive_seed(spec.seed, run))
            seed = derive_seed(cfg.seed, si, run)
            cells = []
            for algo in cfg.algorithms:
                limit = GUARDS.get(algo)
                if limit is not None and spec.num_tables > limit:
                    if run == 0:
                        msg = f"scenario {si}: {algo} skipped, {TooLarge(spec.num_tables, limit, algo)}"
                        warnings.warn(msg, GuardSkipWarning, stacklevel=3)
                    continue
                cells.append(_Cell(si, graph_spec, run, seed, algo, cfg.ant_policy, cfg.aco_params, cfg.sa_params))
            if cells:
                groups.append(cells)
    return groups


def _order_key(r: BenchRecord, algorithms: Sequence[str]) -> tuple:
    return (r.scenario, algorithms.index(r.algorithm), r.run)


def run_benchmark(cfg: BenchConfig) -> list[BenchRecord]:
    """Run every scenario x algorithm x run cell; write CSVs if paths are configured.

    Cells beyond an exact algorithm's size guard are skipped with a
    :class:`GuardSkipWarning` (once per scenario and algorithm) and produce no record.
    """
    groups = _plan(cfg)
    if cfg.workers > 1 and len(groups) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(_run_group, groups))
    else:
        chunks = [_run_group(cells) for cells in groups]
    records = sorted((r for chunk in chunks for r in chunk), key=lambda r: _order_key(r, cfg.algorithms))
    if cfg.output_path:
        emit_csv(records, cfg.output_path, timing=cfg.record_timing)
    if cfg.trace_path:
        emit_trace_csv(((r.scenario, r.run, r.trace) for r in records if r.algorithm == "aco"), cfg.trace_path)
    return records


def ant_count_sweep(cfg: BenchConfig) -> list[BenchRecord]:
    """ACO with one ant per table, then with half as many, on identical graphs and seeds."""
    if "aco" not in cfg.algorithms:
        raise ConfigError("the ant-count sweep needs 'aco' among the algorithms")
    records = []
    for policy in ("equal_to_tables", "half_tables"):
        sub = replace(cfg, algorithms=("aco",), ant_policy=policy, output_path=None, trace_path=None)
        records.extend(run_benchmark(sub))
    if cfg.output_path:
        emit_csv(records, cfg.output_path, timing=cfg.record_timing)
    if cfg.trace_path:
        emit_trace_csv(((r.scenario, r.run, r.trace) for r in records), cfg.trace_path)
    return records


def summarize(records: Iterable[BenchRecord]) -> list[dict]:
    """Per (ant_policy, algorithm, num_tables): mean cost, median time, mean evaluations."""
    groups: dict[tuple, list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.ant_policy, r.algorithm, r.num_tables), []).append(r)
    out = []
    for (policy, algo, n), rs in groups.items():
        out.append(
            {
                "ant_policy": policy,
                "algorithm": algo,
                "num_tables": n,
                "runs": len(rs),
                "mean_best_cost": statistics.fmean(r.best_cost for r in rs),
                "median_elapsed_ms": statistics.median(r.elapsed_ms for r in rs),
                "mean_evaluations": statistics.fmean(r.evaluations for r in rs),
            }
        )
    return out


def _open_out(path: str | Path):
    return open(path, "w", encoding="utf-8", newline="")


def emit_csv(records: Iterable[BenchRecord], path: str | Path, *, timing: bool = True) -> None:
    """Write the results CSV.  ``timing=False`` zeroes elapsed_ms for byte-stable files."""
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in records:
            w.writerow(r.row(timing))


def emit_trace_csv(traces: Iterable[tuple[object, int, object]], path: str | Path) -> None:
    """Write convergence rows; each item is ``(scenario, run, trace)``.

    ``trace`` may be a sequence of best-so-far totals or an :class:`~antjoin.aco.OptResult`.
    """
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for scenario, run, trace in traces:
            values = trace.trace if isinstance(trace, aco.OptResult) else trace
            for it, v in enumerate(values):
                w.writerow([scenario, run, it, repr(float(v))])
