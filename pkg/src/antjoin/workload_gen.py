"""Seeded random query graphs.

Row counts are uniform integers in ``[card_min, card_max]`` and selectivities
are log-uniform in ``[sel_min, sel_max]``.  Draw order is fixed (cardinalities,
then topology, then selectivities in edge order), so a spec and its seed pin
the graph down completely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

import networkx as nx
import numpy as np

from .errors import ConfigError
from .query_model import QueryGraph, make_graph

__all__ = ["TOPOLOGIES", "WorkloadSpec", "generate", "table1_scenarios", "table1_workloads"]

TOPOLOGIES = ("chain", "star", "cycle", "clique", "random_connected")

# extra-edge probability for random_connected, on top of the spanning tree
EXTRA_EDGE_P = 0.25

# (number of tables, mean rows per table) for the seven reference databases
TABLE1 = ((8, 383), (12, 418), (16, 362), (20, 397), (24, 403), (28, 354), (32, 429))


@dataclass(frozen=True)
class WorkloadSpec:
    num_tables: int = 8
    card_min: int = 50
    card_max: int = 750
    topology: str = "random_connected"
    sel_min: float = 0.001
    sel_max: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.num_tables < 2:
            raise ConfigError(f"num_tables must be >= 2, got {self.num_tables}")
        if self.card_min < 1 or self.card_min > self.card_max:
            raise ConfigError(f"need 1 <= card_min <= card_max, got {self.card_min}..{self.card_max}")
        if not 0 < self.sel_min <= self.sel_max <= 1:
            raise ConfigError(f"need 0 < sel_min <= sel_max <= 1, got {self.sel_min}..{self.sel_max}")
        if self.topology not in TOPOLOGIES:
            raise ConfigError(f"unknown topology {self.topology!r}; expected one of {', '.join(TOPOLOGIES)}")
        if self.topology == "cycle" and self.num_tables < 3:
            raise ConfigError("a cycle needs at least 3 tables")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def with_seed(self, seed: int) -> WorkloadSpec:
        return replace(self, seed=seed)


def _pairs(spec: WorkloadSpec, rng: np.random.Generator) -> list[tuple[int, int]]:
    n = spec.num_tables
    if spec.topology == "chain":
        return [(i, i + 1) for i in range(n - 1)]
    if spec.topology == "star":
        return [(0, i) for i in range(1, n)]
    if spec.topology == "cycle":
        return [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    if spec.topology == "clique":
        return list(combinations(range(n), 2))
    # uniform labeled spanning tree via a random Pruefer sequence
    prufer = rng.integers(n, size=n - 2).tolist()
    tree = nx.from_prufer_sequence(prufer) if n > 2 else nx.path_graph(2)
    pairs = {tuple(sorted(e)) for e in tree.edges()}
    for p in combinations(range(n), 2):
        if p not in pairs and rng.random() < EXTRA_EDGE_P:
            pairs.add(p)
    return sorted(pairs)


def generate(spec: WorkloadSpec) -> QueryGraph:
    rng = np.random.default_rng(spec.seed)
    cards = rng.integers(spec.card_min, spec.card_max + 1, size=spec.num_tables).tolist()
    pairs = _pairs(spec, rng)
    lo, hi = math.log(spec.sel_min), math.log(spec.sel_max)
    sels = np.exp(rng.uniform(lo, hi, size=len(pairs))) if hi > lo else np.full(len(pairs), spec.sel_min)
    # exp(log(x)) may drift an ulp outside the bounds
    sels = np.clip(sels, spec.sel_min, spec.sel_max)
    return make_graph(cards, [(a, b, float(s)) for (a, b), s in zip(pairs, sels)])


def table1_scenarios() -> list[tuple[int, int]]:
    """Table counts and mean rows per table of the seven reference databases."""
    return list(TABLE1)


def table1_workloads(
    topology: str = "random_connected", half_width: int = 300, seed: int = 0, **kw
) -> list[WorkloadSpec]:
    """One spec per reference database, row range centred on its mean row count."""
    return [
        WorkloadSpec(
            num_tables=n, card_min=mean - half_width, card_max=mean + half_width, topology=topology, seed=seed + i, **kw
        )
        for i, (n, mean) in enumerate(TABLE1)
    ]
