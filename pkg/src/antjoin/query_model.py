"""Relations, join graphs and join orders.

A :class:`QueryGraph` is the city map of the join-ordering problem: every
table is a node, every join predicate an edge carrying a selectivity.  A
:class:`JoinOrder` is a left-deep plan written as a permutation of table ids.

All values are immutable once built and can be shared freely between threads.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import jsonschema
import numpy as np

from .errors import (
    BadCardinality,
    BadSelectivity,
    ConnectivityViolation,
    DisconnectedGraph,
    DuplicateEdge,
    GraphError,
    GraphSyntaxError,
    InvalidEdge,
    NotAPermutation,
    SchemaError,
    TooFewTables,
)

__all__ = [
    "TableStats",
    "JoinEdge",
    "QueryGraph",
    "JoinOrder",
    "PlanCost",
    "validate_graph",
    "validate_order",
    "is_valid_order",
    "parse_graph",
    "render_graph",
    "graph_to_dict",
    "graph_from_dict",
    "make_graph",
]


@dataclass(frozen=True)
class TableStats:
    id: int
    name: str
    cardinality: int


@dataclass(frozen=True)
class JoinEdge:
    a: int
    b: int
    selectivity: float

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


@dataclass(frozen=True)
class QueryGraph:
    """Tables plus join edges.

    Construction does not validate; call :func:`validate_graph` (or build
    through :func:`make_graph` / :func:`parse_graph`, which do).
    """

    tables: tuple[TableStats, ...]
    edges: tuple[JoinEdge, ...]

    @property
    def n(self) -> int:
        return len(self.tables)

    @cached_property
    def cards(self) -> np.ndarray:
        return np.array([t.cardinality for t in self.tables], dtype=float)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.tables)

    @cached_property
    def sel_matrix(self) -> np.ndarray:
        """n x n selectivities; 1.0 where no edge exists (cross product)."""
        m = np.ones((self.n, self.n))
        for e in self.edges:
            m[e.a, e.b] = m[e.b, e.a] = e.selectivity
        return m

    @cached_property
    def neighbors(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """Per table, ``(neighbor, selectivity)`` pairs sorted by neighbor id."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for e in self.edges:
            adj[e.a].append((e.b, e.selectivity))
            adj[e.b].append((e.a, e.selectivity))
        return tuple(tuple(sorted(row)) for row in adj)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(j for j, _ in row) for row in self.neighbors)

    @cached_property
    def adjacency_masks(self) -> tuple[int, ...]:
        """Neighbor sets as integer bitmasks (bit j set when j is adjacent)."""
        return tuple(sum(1 << j for j in row) for row in self.adjacency)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown table {name!r}") from None

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adjacency[a]


@dataclass(frozen=True)
class JoinOrder:
    sequence: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(int(x) for x in self.sequence))

    def __len__(self) -> int:
        return len(self.sequence)

    def __iter__(self):
        return iter(self.sequence)

    def __getitem__(self, k):
        return self.sequence[k]

    def names(self, g: QueryGraph) -> list[str]:
        return [g.tables[i].name for i in self.sequence]


@dataclass(frozen=True)
class PlanCost:
    """C_out cost of a left-deep plan: the per-join intermediate sizes and their sum."""

    total: float
    steps: tuple[float, ...]


def _as_sequence(order: JoinOrder | Sequence[int]) -> tuple[int, ...]:
    if isinstance(order, JoinOrder):
        return order.sequence
    return tuple(int(x) for x in order)


def validate_graph(g: QueryGraph) -> None:
    """Raise the error for the first violated graph invariant; return None if valid."""
    n = len(g.tables)
    if n < 2:
        raise TooFewTables(f"a query graph needs at least 2 tables, got {n}")
    for i, t in enumerate(g.tables):
        if t.id != i:
            raise GraphError(f"table ids must be 0..{n - 1} in order; position {i} has id {t.id}")
        if isinstance(t.cardinality, bool) or not isinstance(t.cardinality, (int, np.integer)) or t.cardinality < 1:
            raise BadCardinality(f"table {t.name!r} has cardinality {t.cardinality!r}; must be an integer >= 1")
    seen: set[tuple[int, int]] = set()
    for e in g.edges:
        if not (0 <= e.a < n and 0 <= e.b < n):
            raise InvalidEdge(f"edge ({e.a}, {e.b}) references a table outside 0..{n - 1}")
        if e.a == e.b:
            raise InvalidEdge(f"self-join on table {e.a} is not allowed")
        if not (0.0 < e.selectivity <= 1.0):
            raise BadSelectivity(f"edge ({e.a}, {e.b}) has selectivity {e.selectivity!r}; must lie in (0, 1]")
        if e.pair in seen:
            raise DuplicateEdge(f"more than one edge between tables {e.pair[0]} and {e.pair[1]}")
        seen.add(e.pair)

    adj: list[list[int]] = [[] for _ in range(n)]
    for e in g.edges:
        adj[e.a].append(e.b)
        adj[e.b].append(e.a)
    reached = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in reached:
                reached.add(j)
                stack.append(j)
    if len(reached) < n:
        missing = min(set(range(n)) - reached)
        raise DisconnectedGraph(f"table {g.tables[missing].name!r} is unreachable from table {g.tables[0].name!r}")


def validate_order(g: QueryGraph, order: JoinOrder | Sequence[int]) -> None:
    """Check that ``order`` is a permutation whose every table touches its prefix."""
    seq = _as_sequence(order)
    n = g.n
    if len(seq) != n or sorted(seq) != list(range(n)):
        raise NotAPermutation(f"order {list(seq)} is not a permutation of 0..{n - 1}")
    adj = g.adjacency_masks
    prefix = 1 << seq[0]
    for k in range(1, n):
        t = seq[k]
        if not adj[t] & prefix:
            raise ConnectivityViolation(k, t)
        prefix |= 1 << t


def is_valid_order(g: QueryGraph, order: JoinOrder | Sequence[int]) -> bool:
    try:
        validate_order(g, order)
    except (NotAPermutation, ConnectivityViolation):
        return False
    return True


def make_graph(
    cards: Sequence[int],
    edges: Iterable[tuple[int, int, float]],
    names: Sequence[str] | None = None,
) -> QueryGraph:
    """Build and validate a graph from plain Python values."""
    if names is None:
        names = [_default_name(i) for i in range(len(cards))]
    tables = tuple(TableStats(i, str(nm), int(c)) for i, (nm, c) in enumerate(zip(names, cards)))
    g = QueryGraph(tables, tuple(JoinEdge(int(a), int(b), float(s)) for a, b, s in edges))
    validate_graph(g)
    return g


def _default_name(i: int) -> str:
    return f"T{i}"


# --- JSON document -----------------------------------------------------------

GRAPH_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["tables", "joins"],
    "properties": {
        "tables": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "rows"],
                "properties": {"name": {"type": "string", "minLength": 1}, "rows": {"type": "integer"}},
            },
        },
        "joins": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["left", "right", "selectivity"],
                "properties": {
                    "left": {"type": "string"},
                    "right": {"type": "string"},
                    "selectivity": {"type": "number"},
                },
            },
        },
    },
}


def graph_from_dict(doc: object) -> QueryGraph:
    try:
        jsonschema.validate(doc, GRAPH_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{where}: {exc.message}") from None
    assert isinstance(doc, dict)

    index: dict[str, int] = {}
    tables = []
    for i, t in enumerate(doc["tables"]):
        if t["name"] in index:
            raise SchemaError(f"duplicate table name {t['name']!r}")
        index[t["name"]] = i
        tables.append(TableStats(i, t["name"], int(t["rows"])))
    edges = []
    for j in doc["joins"]:
        for side in ("left", "right"):
            if j[side] not in index:
                raise SchemaError(f"join references unknown table {j[side]!r}")
        edges.append(JoinEdge(index[j["left"]], index[j["right"]], float(j["selectivity"])))
    g = QueryGraph(tuple(tables), tuple(edges))
    validate_graph(g)
    return g


def parse_graph(document: str) -> QueryGraph:
    """Parse a query-graph JSON document; table order in the file defines ids."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise GraphSyntaxError(f"invalid JSON: {exc}") from None
    return graph_from_dict(doc)


def graph_to_dict(g: QueryGraph) -> dict:
    return {
        "tables": [{"name": t.name, "rows": int(t.cardinality)} for t in g.tables],
        "joins": [
            {"left": g.tables[e.a].name, "right": g.tables[e.b].name, "selectivity": e.selectivity}
            for e in g.edges
        ],
    }


def render_graph(g: QueryGraph, indent: int | None = 2) -> str:
    return json.dumps(graph_to_dict(g), indent=indent) + "\n"
