"""Exact oracles and comparison heuristics for left-deep join ordering.

``exhaustive`` enumerates orders depth-first; ``dp_optimal`` runs a subset
dynamic program vectorized over bitmasks.  The two share nothing but the cost
formula, so agreement between them is a meaningful check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .cost_model import _step_sel, tour_cost
from .errors import ConfigError, TooLarge
from .query_model import JoinOrder, PlanCost, QueryGraph

__all__ = [
    "BaselineResult",
    "SAParams",
    "EXHAUSTIVE_LIMIT",
    "DP_LIMIT",
    "exhaustive",
    "dp_optimal",
    "greedy_nn",
    "random_order",
    "random_sample",
    "simulated_annealing",
]

EXHAUSTIVE_LIMIT = 10
DP_LIMIT = 20


@dataclass(frozen=True)
class BaselineResult:
    order: JoinOrder
    cost: PlanCost
    evaluations: int
    elapsed: float = field(default=0.0, compare=False)


def exhaustive(g: QueryGraph) -> BaselineResult:
    """Minimum-cost order over every connectivity-respecting permutation.

    Ties keep the lexicographically smallest order, which falls out of
    visiting tables in ascending id order and replacing only on strict
    improvement.
    """
    n = g.n
    if n > EXHAUSTIVE_LIMIT:
        raise TooLarge(n, EXHAUSTIVE_LIMIT, "exhaustive search")
    t0 = time.perf_counter()
    cards = [t.cardinality for t in g.tables]
    adj = g.adjacency_masks
    full = (1 << n) - 1
    best_total = math.inf
    best_seq: list[int] = []
    seq: list[int] = []
    leaves = 0

    # partial sums are carried exactly as tour_cost accumulates them
    def dfs(mask: int, inter: float, total: float) -> None:
        nonlocal best_total, best_seq, leaves
        if mask == full:
            leaves += 1
            if total < best_total:
                best_total, best_seq = total, seq.copy()
            return
        for t in range(n):
            if mask >> t & 1 or not adj[t] & mask:
                continue
            nxt = inter * cards[t] * _step_sel(g, mask, t)
            seq.append(t)
            dfs(mask | 1 << t, nxt, total + nxt)
            seq.pop()

    for s in range(n):
        seq.append(s)
        dfs(1 << s, float(cards[s]), 0)
        seq.pop()

    order = JoinOrder(best_seq)
    return BaselineResult(order, tour_cost(g, order), leaves, time.perf_counter() - t0)


def dp_optimal(g: QueryGraph) -> BaselineResult:
    """Left-deep subset DP over connected table sets.

    ``evaluations`` counts the (subset, last table) transitions costed.
    """
    n = g.n
    if n > DP_LIMIT:
        raise TooLarge(n, DP_LIMIT, "dynamic programming")
    t0 = time.perf_counter()
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    popcount = np.zeros(size, dtype=np.int8)
    for t in range(n):
        popcount += ((masks >> t) & 1).astype(np.int8)

    cost = np.full(size, np.inf)
    inter = np.zeros(size)
    last = np.full(size, -1, dtype=np.int8)
    for t in range(n):
        cost[1 << t] = 0.0
        inter[1 << t] = float(g.tables[t].cardinality)
        last[1 << t] = t

    transitions = 0
    for k in range(2, n + 1):
        level = masks[popcount == k]
        best_c = np.full(level.size, np.inf)
        best_i = np.zeros(level.size)
        best_t = np.full(level.size, -1, dtype=np.int8)
        for t in range(n):
            has_t = ((level >> t) & 1).astype(bool)
            idx = np.nonzero(has_t)[0]
            prev = level[idx] ^ (1 << t)
            ok = ((prev & g.adjacency_masks[t]) != 0) & np.isfinite(cost[prev])
            idx, prev = idx[ok], prev[ok]
            transitions += idx.size
            sel = np.ones(idx.size)
            for j, s in g.neighbors[t]:
                sel = np.where((prev >> j) & 1, sel * s, sel)
            new_i = inter[prev] * float(g.tables[t].cardinality) * sel
            new_c = cost[prev] + new_i
            better = new_c < best_c[idx]
            upd = idx[better]
            best_c[upd] = new_c[better]
            best_i[upd] = new_i[better]
            best_t[upd] = t
        cost[level] = best_c
        inter[level] = best_i
        last[level] = best_t

    seq = []
    mask = size - 1
    while mask:
        t = int(last[mask])
        seq.append(t)
        mask ^= 1 << t
    order = JoinOrder(reversed(seq))
    return BaselineResult(order, tour_cost(g, order), transitions, time.perf_counter() - t0)


def greedy_nn(g: QueryGraph, start: int) -> BaselineResult:
    """Walk from ``start``, always joining the table giving the smallest next intermediate."""
    if not 0 <= start < g.n:
        raise ConfigError(f"start table {start} outside 0..{g.n - 1}")
    t0 = time.perf_counter()
    cards = [t.cardinality for t in g.tables]
    adj = g.adjacency_masks
    seq = [start]
    mask = 1 << start
    inter = float(cards[start])
    for _ in range(g.n - 1):
        best_t, best_i = -1, math.inf
        for t in range(g.n):
            if mask >> t & 1 or not adj[t] & mask:
                continue
            cand = inter * cards[t] * _step_sel(g, mask, t)
            if cand < best_i or best_t < 0:
                best_t, best_i = t, cand
        seq.append(best_t)
        mask |= 1 << best_t
        inter = best_i
    order = JoinOrder(seq)
    return BaselineResult(order, tour_cost(g, order), 1, time.perf_counter() - t0)


def random_order(g: QueryGraph, rng: np.random.Generator) -> JoinOrder:
    """Random valid order: uniform start, then uniform over valid next tables."""
    n = g.n
    adj = g.adjacency_masks
    start = int(rng.integers(n))
    seq = [start]
    mask = 1 << start
    for _ in range(n - 1):
        cands = [t for t in range(n) if not mask >> t & 1 and adj[t] & mask]
        t = cands[int(rng.integers(len(cands)))]
        seq.append(t)
        mask |= 1 << t
    return JoinOrder(seq)


def random_sample(g: QueryGraph, budget: int, rng: np.random.Generator) -> BaselineResult:
    if budget < 1:
        raise ConfigError(f"budget must be >= 1, got {budget}")
    t0 = time.perf_counter()
    best_order, best_cost = None, None
    for _ in range(budget):
        order = random_order(g, rng)
        c = tour_cost(g, order, strict=False)
        if best_cost is None or c.total < best_cost.total:
            best_order, best_cost = order, c
    return BaselineResult(best_order, best_cost, budget, time.perf_counter() - t0)


@dataclass(frozen=True)
class SAParams:
    """Simulated annealing settings.

    ``initial_temp=None`` sets the starting temperature to ``temp_scale``
    times the cost of the initial order, since C_out spans many magnitudes.
    """

    steps: int = 1000
    initial_temp: float | None = None
    temp_scale: float = 0.5
    cooling: float = 0.995
    max_retries: int = 20

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.initial_temp is not None and not self.initial_temp > 0:
            raise ConfigError(f"initial_temp must be > 0, got {self.initial_temp}")
        if not self.temp_scale > 0:
            raise ConfigError(f"temp_scale must be > 0, got {self.temp_scale}")
        if not 0 < self.cooling < 1:
            raise ConfigError(f"cooling must lie in (0, 1), got {self.cooling}")
        if self.max_retries < 1:
            raise ConfigError(f"max_retries must be >= 1, got {self.max_retries}")


def _prefix_ok(adj: tuple[int, ...], seq: list[int]) -> bool:
    mask = 1 << seq[0]
    for t in seq[1:]:
        if not adj[t] & mask:
            return False
        mask |= 1 << t
    return True


def simulated_annealing(
    g: QueryGraph, params: SAParams | None = None, rng: np.random.Generator | None = None, *, history: list | None = None
) -> BaselineResult:
    """Swap-neighborhood annealing over valid orders with geometric cooling.

    Invalid swaps are redrawn up to ``max_retries`` times, after which the
    step is skipped without an evaluation.  If ``history`` is given, every
    accepted move is appended to it as ``(old_total, new_total)``.
    """
    params = params or SAParams()
    rng = rng if rng is not None else np.random.default_rng()
    t0 = time.perf_counter()
    n = g.n
    adj = g.adjacency_masks

    cur = list(random_order(g, rng))
    cur_cost = tour_cost(g, cur)
    evaluations = 1
    best, best_cost = cur.copy(), cur_cost
    temp = params.initial_temp if params.initial_temp is not None else params.temp_scale * cur_cost.total

    for _ in range(params.steps):
        cand = None
        if n > 1:
            for _ in range(params.max_retries):
                i, j = rng.choice(n, size=2, replace=False)
                trial = cur.copy()
                trial[i], trial[j] = trial[j], trial[i]
                if _prefix_ok(adj, trial):
                    cand = trial
                    break
        if cand is not None:
            c = tour_cost(g, cand, strict=False)
            evaluations += 1
            delta = c.total - cur_cost.total
            if delta <= 0:
                accept = True
            else:
                # exp(-x) underflows to 0 beyond x ~ 745
                accept = temp > 0 and delta / temp < 745.0 and rng.random() < math.exp(-delta / temp)
            if accept:
                if history is not None:
                    history.append((cur_cost.total, c.total))
                cur, cur_cost = cand, c
                if cur_cost.total < best_cost.total:
                    best, best_cost = cur.copy(), cur_cost
        temp *= params.cooling

    return BaselineResult(JoinOrder(best), best_cost, evaluations, time.perf_counter() - t0)

