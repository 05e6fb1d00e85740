import itertools
import math

import functools

import pytest

import antjoin
from antjoin import aco
from antjoin.query_model import make_graph
from antjoin.workload_gen import WorkloadSpec, generate

FIXED_TOPOLOGIES = ("chain", "star", "cycle", "clique")

# Every in-process optimize call made by the suite goes through this check.
# Installed at collection time so `from antjoin.aco import optimize` in test
# modules binds the wrapped version too.
TRACE_CHECKS = {"calls": 0}
ACCEPTANCE = []
_optimize = aco.optimize


@functools.wraps(_optimize)
def _checked_optimize(*args, **kwargs):
    r = _optimize(*args, **kwargs)
    assert all(a >= b for a, b in zip(r.trace, r.trace[1:])), "best-so-far trace increased"
    assert r.trace[-1] == r.best_cost.total
    TRACE_CHECKS["calls"] += 1
    return r


aco.optimize = antjoin.optimize = _checked_optimize


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
    terminalreporter.write_line(f"trace monotonicity checked on {TRACE_CHECKS['calls']} optimize calls")


@pytest.fixture
def chain3():
    """A(100) - B(10) - C(1000), selectivities 0.1 and 0.01."""
    return make_graph([100, 10, 1000], [(0, 1, 0.1), (1, 2, 0.01)], ["A", "B", "C"])


@pytest.fixture
def star4():
    """Center S(10) with leaves L1, L2, L3 of 100 rows each."""
    return make_graph([10, 100, 100, 100], [(0, 1, 0.5), (0, 2, 0.01), (0, 3, 0.1)], ["S", "L1", "L2", "L3"])


def random_graphs(count, sizes=range(4, 9), topologies=FIXED_TOPOLOGIES, base_seed=0):
    out = []
    for i in range(count):
        n = sizes[i % len(sizes)]
        topo = topologies[(i // len(sizes)) % len(topologies)]
        if topo == "cycle" and n < 3:
            topo = "chain"
        out.append(generate(WorkloadSpec(num_tables=n, topology=topo, seed=base_seed + i)))
    return out


# --- independent oracles -----------------------------------------------------


def set_cardinality(g, tables):
    """Result size of joining ``tables``: product of rows times all internal edge selectivities."""
    tables = set(tables)
    size = math.prod(g.tables[t].cardinality for t in tables)
    for e in g.edges:
        if e.a in tables and e.b in tables:
            size *= e.selectivity
    return size


def oracle_cost(g, order):
    """C_out computed from prefix sets, not from the incremental recurrence."""
    return sum(set_cardinality(g, order[: k + 1]) for k in range(1, len(order)))


def connected_orders(g):
    """Brute-force filter of all permutations down to connectivity-respecting ones."""
    adj = {t: set() for t in range(g.n)}
    for e in g.edges:
        adj[e.a].add(e.b)
        adj[e.b].add(e.a)
    for perm in itertools.permutations(range(g.n)):
        if all(adj[perm[k]] & set(perm[:k]) for k in range(1, g.n)):
            yield perm


def brute_force_optimum(g):
    return min(oracle_cost(g, p) for p in connected_orders(g))
