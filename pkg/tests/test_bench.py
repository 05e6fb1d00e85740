import csv
import warnings

import pytest

from antjoin.aco import AcoParams
from antjoin.bench import (
    RESULT_COLUMNS,
    TRACE_COLUMNS,
    BenchConfig,
    BenchRecord,
    GuardSkipWarning,
    ant_count_sweep,
    ants_for_policy,
    emit_csv,
    emit_trace_csv,
    run_benchmark,
    summarize,
)
from antjoin.errors import ConfigError
from antjoin.workload_gen import WorkloadSpec, table1_workloads

SMALL = AcoParams(iterations=5)


def small_cfg(**kw):
    base = dict(
        scenarios=[WorkloadSpec(num_tables=6, topology="chain", seed=1), WorkloadSpec(num_tables=8, seed=2)],
        algorithms=("aco", "dp", "greedy", "random", "sa"),
        runs=3,
        aco_params=SMALL,
    )
    base.update(kw)
    return BenchConfig(**base)


def test_single_cell():
    recs = run_benchmark(BenchConfig([WorkloadSpec(num_tables=5)], algorithms=("aco",), runs=1, aco_params=SMALL))
    assert len(recs) == 1
    assert recs[0].evaluations == 5 * 5


def test_record_count_and_order():
    cfg = small_cfg()
    recs = run_benchmark(cfg)
    assert len(recs) == 2 * 5 * 3
    keys = [(r.scenario, cfg.algorithms.index(r.algorithm), r.run) for r in recs]
    assert keys == sorted(keys)


def test_results_bounded_by_dp():
    recs = run_benchmark(small_cfg())
    opt = {(r.scenario, r.run): r.best_cost for r in recs if r.algorithm == "dp"}
    for r in recs:
        assert r.best_cost >= opt[(r.scenario, r.run)]


def test_fair_budget():
    recs = run_benchmark(small_cfg(algorithms=("aco", "random")))
    by = {(r.scenario, r.run, r.algorithm): r.evaluations for r in recs}
    for (s, run, algo), ev in by.items():
        if algo == "aco":
            assert by[(s, run, "random")] == ev


def test_guard_skip_accounting():
    cfg = BenchConfig(
        [WorkloadSpec(num_tables=6, seed=1), WorkloadSpec(num_tables=12, seed=2)],
        algorithms=("exhaustive", "greedy"),
        runs=2,
        aco_params=SMALL,
    )
    with pytest.warns(GuardSkipWarning, match="exhaustive"):
        recs = run_benchmark(cfg)
    assert len(recs) == 2 * 2 * 2 - 2
    assert not any(r.algorithm == "exhaustive" and r.num_tables == 12 for r in recs)


def test_table1_accounting_without_running():
    from antjoin.bench import _plan

    cfg = BenchConfig(table1_workloads(), algorithms=("aco", "greedy", "random"), runs=20)
    assert sum(len(g) for g in _plan(cfg)) == 7 * 3 * 20


def test_deterministic_csv(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_benchmark(small_cfg(output_path=str(a), record_timing=False))
    run_benchmark(small_cfg(output_path=str(b), record_timing=False))
    assert a.read_bytes() == b.read_bytes()


def test_workers_match_serial(tmp_path):
    serial = run_benchmark(small_cfg(workers=1))
    pooled = run_benchmark(small_cfg(workers=2))
    strip = [(r.algorithm, r.run, r.seed, r.best_cost, r.evaluations, r.trace) for r in serial]
    assert strip == [(r.algorithm, r.run, r.seed, r.best_cost, r.evaluations, r.trace) for r in pooled]


def test_ant_count_sweep():
    cfg = small_cfg(algorithms=("aco",), runs=2)
    recs = ant_count_sweep(cfg)
    assert len(recs) == 2 * 2 * 2
    full = {(r.scenario, r.run): r for r in recs if r.ant_policy == "equal_to_tables"}
    half = {(r.scenario, r.run): r for r in recs if r.ant_policy == "half_tables"}
    for k, r in full.items():
        assert half[k].seed == r.seed
        assert abs(half[k].evaluations - r.evaluations / 2) <= SMALL.iterations
    rows = summarize(recs)
    assert {row["ant_policy"] for row in rows} == {"equal_to_tables", "half_tables"}
    assert all("mean_best_cost" in row for row in rows)


def test_ant_count_sweep_needs_aco():
    with pytest.raises(ConfigError):
        ant_count_sweep(small_cfg(algorithms=("greedy",)))


@pytest.mark.parametrize("policy, n, expected", [("equal_to_tables", 9, 9), ("half_tables", 9, 5), ("fixed:3", 9, 3)])
def test_ant_policies(policy, n, expected):
    assert ants_for_policy(policy, n) == expected


@pytest.mark.parametrize(
    "kw",
    [dict(scenarios=[]), dict(algorithms=()), dict(algorithms=("pso",)), dict(runs=0), dict(ant_policy="fixed:0")],
)
def test_invalid_config(kw):
    with pytest.raises(ConfigError):
        small_cfg(**kw)


class TestCsv:
    def test_header_only(self, tmp_path):
        p = tmp_path / "r.csv"
        emit_csv([], p)
        assert p.read_text() == ",".join(RESULT_COLUMNS) + "\n"

    def test_line_count_and_format(self, tmp_path):
        rec = BenchRecord("aco", "equal_to_tables", 8, "chain", 0, 7, 1234.5, 3.25, 240)
        p = tmp_path / "r.csv"
        emit_csv([rec] * 420, p)
        raw = p.read_bytes()
        assert b"\r\n" not in raw
        lines = raw.decode("utf-8").splitlines()
        assert len(lines) == 421
        assert lines[1] == "aco,equal_to_tables,8,chain,0,7,1234.5,3.250,240"

    def test_decimal_point_under_other_locale(self, tmp_path):
        import locale

        old = locale.setlocale(locale.LC_NUMERIC)
        try:
            for name in ("de_DE.UTF-8", "fr_FR.UTF-8"):
                try:
                    locale.setlocale(locale.LC_NUMERIC, name)
                    break
                except locale.Error:
                    continue
            p = tmp_path / "r.csv"
            emit_csv([BenchRecord("dp", "equal_to_tables", 4, "star", 0, 1, 0.5, 1.5, 3)], p)
            row = next(csv.DictReader(p.open()))
            assert row["best_cost"] == "0.5" and row["elapsed_ms"] == "1.500"
        finally:
            locale.setlocale(locale.LC_NUMERIC, old)

    def test_trace_csv(self, tmp_path):
        p = tmp_path / "t.csv"
        emit_trace_csv([(0, 1, (5.0, 4.0, 4.0))], p)
        lines = p.read_text().splitlines()
        assert lines[0] == ",".join(TRACE_COLUMNS)
        assert lines[1:] == ["0,1,0,5.0", "0,1,1,4.0", "0,1,2,4.0"]

    def test_run_writes_trace(self, tmp_path):
        out, tr = tmp_path / "r.csv", tmp_path / "t.csv"
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            run_benchmark(small_cfg(algorithms=("aco", "greedy"), output_path=str(out), trace_path=str(tr)))
        assert len(out.read_text().splitlines()) == 1 + 2 * 2 * 3
        assert len(tr.read_text().splitlines()) == 1 + 2 * 3 * SMALL.iterations
