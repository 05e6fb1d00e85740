import math

import numpy as np
import pytest
from scipy import stats

from antjoin.errors import ConfigError
from antjoin.query_model import validate_graph
from antjoin.workload_gen import (
    TOPOLOGIES,
    WorkloadSpec,
    generate,
    table1_scenarios,
    table1_workloads,
)


def test_chain_spec_example():
    g = generate(WorkloadSpec(num_tables=8, card_min=50, card_max=750, topology="chain", sel_min=0.001, sel_max=0.1, seed=7))
    assert g.n == 8
    assert sorted(e.pair for e in g.edges) == [(i, i + 1) for i in range(7)]
    assert all(50 <= t.cardinality <= 750 for t in g.tables)
    assert all(0.001 <= e.selectivity <= 0.1 for e in g.edges)


@pytest.mark.parametrize("n, expected", [(4, 6), (6, 15)])
def test_clique_edge_count(n, expected):
    assert len(generate(WorkloadSpec(num_tables=n, topology="clique")).edges) == expected


def test_star_and_cycle_shapes():
    star = generate(WorkloadSpec(num_tables=5, topology="star"))
    assert {e.pair for e in star.edges} == {(0, i) for i in range(1, 5)}
    cyc = generate(WorkloadSpec(num_tables=5, topology="cycle"))
    assert {e.pair for e in cyc.edges} == {(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)}


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_deterministic(topology):
    spec = WorkloadSpec(num_tables=9, topology=topology, seed=99)
    assert generate(spec) == generate(spec)
    assert generate(spec) != generate(spec.with_seed(100))


def test_random_connected_always_valid():
    for seed in range(200):
        g = generate(WorkloadSpec(num_tables=2 + seed % 15, topology="random_connected", seed=seed))
        validate_graph(g)
        assert len(g.edges) >= g.n - 1


@pytest.mark.parametrize(
    "kw",
    [
        dict(num_tables=1),
        dict(card_min=0),
        dict(card_min=10, card_max=5),
        dict(sel_min=0.0),
        dict(sel_min=0.5, sel_max=0.1),
        dict(sel_max=1.5),
        dict(topology="tree"),
        dict(topology="cycle", num_tables=2),
    ],
)
def test_invalid_specs(kw):
    with pytest.raises(ConfigError):
        WorkloadSpec(**kw)


def test_cardinality_mean():
    cards = []
    for seed in range(400):
        g = generate(WorkloadSpec(num_tables=32, topology="chain", seed=seed))
        cards.extend(t.cardinality for t in g.tables)
    assert len(cards) >= 10_000
    assert np.mean(cards) == pytest.approx(400, rel=0.05)


def test_selectivities_log_uniform():
    sels = []
    for seed in range(20):
        g = generate(WorkloadSpec(num_tables=40, topology="clique", seed=seed))
        sels.extend(e.selectivity for e in g.edges)
    assert len(sels) >= 10_000
    lo, hi = math.log(0.001), math.log(0.1)
    u = (np.log(sels) - lo) / (hi - lo)
    assert stats.kstest(u, "uniform").pvalue > 0.001


def test_table1():
    rows = table1_scenarios()
    assert len(rows) == 7
    assert rows[0] == (8, 383)
    assert rows[-1] == (32, 429)
    assert rows == [(8, 383), (12, 418), (16, 362), (20, 397), (24, 403), (28, 354), (32, 429)]


def test_table1_workloads_centred():
    for spec, (n, mean) in zip(table1_workloads(), table1_scenarios()):
        assert spec.num_tables == n
        assert (spec.card_min + spec.card_max) / 2 == mean
