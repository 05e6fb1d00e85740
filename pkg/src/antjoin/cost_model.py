"""Cardinality and C_out cost estimation for left-deep join sequences.

Intermediate sizes follow the independence model: joining a table into a
prefix multiplies the running cardinality by the table's row count and by the
selectivity of every edge connecting it to the prefix.  A pair without an edge
behaves like a cross product (selectivity 1.0).

The plan cost is the sum of all intermediate cardinalities, including the
final one (which is the same for every complete order).
"""

from __future__ import annotations

from collections.abc import Collection, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import NextAlreadyJoined, SameTable
from .query_model import JoinOrder, PlanCost, QueryGraph, _as_sequence, validate_order

__all__ = [
    "EtaMatrix",
    "join_cardinality",
    "pairwise_join_cost",
    "step_selectivity",
    "tour_cost",
    "build_eta",
]


@dataclass(frozen=True, eq=False)
class EtaMatrix:
    """Static heuristic desirability: reciprocal pairwise join cost, diagonal zero."""

    values: np.ndarray
    _powers: dict = field(default_factory=dict, repr=False)

    def __getitem__(self, idx):
        return self.values[idx]

    def powered(self, beta: float) -> np.ndarray:
        """``values ** beta``, cached per exponent."""
        p = self._powers.get(beta)
        if p is None:
            p = self._powers[beta] = self.values**beta
        return p


def join_cardinality(left_card: float, right_card: int, sel: float) -> float:
    return left_card * right_card * sel


def pairwise_join_cost(g: QueryGraph, r: int, u: int) -> float:
    """Size of joining base tables ``r`` and ``u`` on their own."""
    if r == u:
        raise SameTable(f"pairwise cost needs two distinct tables, got {r} twice")
    t = g.tables
    return join_cardinality(float(t[r].cardinality), t[u].cardinality, float(g.sel_matrix[r, u]))


def _step_sel(g: QueryGraph, prefix_mask: int, nxt: int) -> float:
    # Product in ascending neighbor order; the DP oracle replays the same order.
    sel = 1.0
    for j, s in g.neighbors[nxt]:
        if prefix_mask >> j & 1:
            sel *= s
    return sel


def step_selectivity(g: QueryGraph, prefix: Collection[int], next: int) -> float:
    """Combined selectivity of all edges between ``next`` and the tables in ``prefix``."""
    if next in prefix:
        raise NextAlreadyJoined(f"table {next} is already part of the prefix")
    mask = 0
    for p in prefix:
        mask |= 1 << p
    return _step_sel(g, mask, next)


def tour_cost(g: QueryGraph, order: JoinOrder | Sequence[int], *, strict: bool = True) -> PlanCost:
    """Evaluate a complete left-deep order.

    With ``strict=False`` any permutation is accepted and cross products are
    costed as such.
    """
    seq = _as_sequence(order)
    if strict:
        validate_order(g, seq)
    cards = [t.cardinality for t in g.tables]
    inter = float(cards[seq[0]])
    mask = 1 << seq[0]
    steps = []
    for t in seq[1:]:
        inter = inter * cards[t] * _step_sel(g, mask, t)
        steps.append(inter)
        mask |= 1 << t
    return PlanCost(total=sum(steps), steps=tuple(steps))


def build_eta(g: QueryGraph) -> EtaMatrix:
    cards = g.cards
    with np.errstate(over="ignore", divide="ignore"):
        cost = np.outer(cards, cards) * g.sel_matrix
        eta = 1.0 / cost
    np.fill_diagonal(eta, 0.0)
    return EtaMatrix(eta)
