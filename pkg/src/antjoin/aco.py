"""Ant Colony System for join ordering.

Tables are cities and a join order is an open tour (no return edge).  Each
ant starts on a uniformly drawn table and extends its tour with the
pseudo-random proportional rule: with probability ``q0`` it takes the
candidate maximizing ``tau * eta**beta``, otherwise it samples a candidate in
proportion to that score.  Candidates are the unvisited tables adjacent to
the tour so far (strict mode) or all unvisited tables (relaxed mode).

Pheromone is maintained by two rules:

* local update after every step, pulling the traversed arc back toward ``tau0``;
* global update after every iteration, evaporating every arc by ``rho`` and
  depositing ``rho / L_gb`` on the arcs of the best tour found so far.

Random streams
--------------
Every ant in every iteration draws from its own generator,
``numpy.random.default_rng([seed, iteration, ant])``.  The start table is the
first draw from that stream, then each move consumes one draw for ``q`` and,
when exploring, one more for the roulette wheel.  Because no stream is shared,
sequential and parallel construction are each reproducible from the seed.

Parallel mode
-------------
With ``parallel=True`` the ants of one iteration build their tours against a
snapshot of the pheromone taken at the start of the iteration.  Their local
updates are collected and applied in ascending ant order at the iteration
barrier, so the result does not depend on thread scheduling.  This is a
different (batched) semantics from the sequential mode, where each ant sees
the local updates of the ants before it.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import greedy_nn
from .cost_model import EtaMatrix, build_eta
from .errors import ConfigError
from .query_model import JoinOrder, PlanCost, QueryGraph, validate_graph

__all__ = [
    "AcoParams",
    "PheromoneMatrix",
    "AntState",
    "OptResult",
    "ant_rng",
    "init_pheromone",
    "candidate_set",
    "transition_scores",
    "transition_probabilities",
    "choose_next",
    "local_update",
    "global_update",
    "construct_tour",
    "optimize",
]


@dataclass(frozen=True)
class AcoParams:
    num_ants: int | None = None  # None: one ant per table
    beta: float = 2.0
    rho: float = 0.1
    q0: float = 0.9
    iterations: int = 30
    seed: int = 0
    parallel: bool = False
    strict_connectivity: bool = True
    workers: int | None = None  # thread count in parallel mode

    def __post_init__(self):
        if self.num_ants is not None and self.num_ants < 1:
            raise ConfigError(f"num_ants must be >= 1, got {self.num_ants}")
        if not self.beta >= 0:
            raise ConfigError(f"beta must be >= 0, got {self.beta}")
        if not 0 < self.rho < 1:
            raise ConfigError(f"rho must lie in (0, 1), got {self.rho}")
        if not 0 <= self.q0 <= 1:
            raise ConfigError(f"q0 must lie in [0, 1], got {self.q0}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def ants_for(self, n: int) -> int:
        return n if self.num_ants is None else self.num_ants


@dataclass
class PheromoneMatrix:
    values: np.ndarray
    tau0: float

    def copy(self) -> PheromoneMatrix:
        return PheromoneMatrix(self.values.copy(), self.tau0)


@dataclass
class AntState:
    current: int
    visited: list[int]
    visited_set: set[int]
    steps: list[float] = field(default_factory=list)
    # bookkeeping for candidate_set / cost accumulation
    mask: int = 0
    intermediate: float = 0.0

    @classmethod
    def start(cls, g: QueryGraph, table: int) -> AntState:
        return cls(table, [table], {table}, [], 1 << table, float(g.tables[table].cardinality))

    @property
    def accumulated_cost(self) -> float:
        return sum(self.steps)

    def advance(self, g: QueryGraph, nxt: int) -> None:
        sel = 1.0
        for j, s in g.neighbors[nxt]:
            if self.mask >> j & 1:
                sel *= s
        self.intermediate = self.intermediate * g.tables[nxt].cardinality * sel
        self.steps.append(self.intermediate)
        self.visited.append(nxt)
        self.visited_set.add(nxt)
        self.mask |= 1 << nxt
        self.current = nxt


@dataclass(frozen=True)
class OptResult:
    best_order: JoinOrder
    best_cost: PlanCost
    trace: tuple[float, ...]
    evaluations: int
    elapsed: float = field(default=0.0, compare=False)


def ant_rng(seed: int, iteration: int, ant: int) -> np.random.Generator:
    """The generator owned by ``ant`` during ``iteration``."""
    return np.random.default_rng([seed, iteration, ant])


def init_pheromone(g: QueryGraph, params: AcoParams | None = None) -> PheromoneMatrix:
    """Uniform pheromone at ``tau0 = 1 / (n * L_nn)`` with L_nn the greedy cost from table 0."""
    l_nn = greedy_nn(g, 0).cost.total
    tau0 = 1.0 / (g.n * l_nn)
    values = np.full((g.n, g.n), tau0)
    np.fill_diagonal(values, 0.0)
    return PheromoneMatrix(values, tau0)


def candidate_set(g: QueryGraph, state: AntState, strict: bool = True) -> list[int]:
    """Tables the ant may move to next, in ascending id order."""
    if not strict:
        return [t for t in range(g.n) if t not in state.visited_set]
    adj = g.adjacency_masks
    return [t for t in range(g.n) if t not in state.visited_set and adj[t] & state.mask]


def _scores(r: int, cands: list[int], tau: PheromoneMatrix, eta: EtaMatrix, beta: float) -> np.ndarray:
    return tau.values[r][cands] * eta.powered(beta)[r][cands]


def transition_scores(
    state: AntState, candidates: list[int], tau: PheromoneMatrix, eta: EtaMatrix, beta: float
) -> dict[int, float]:
    cands = sorted(candidates)
    return dict(zip(cands, _scores(state.current, cands, tau, eta, beta).tolist()))


def transition_probabilities(scores: np.ndarray) -> np.ndarray:
    """Exploration distribution: scores normalized to sum to one."""
    scores = np.asarray(scores, dtype=float)
    return scores / scores.sum()


def _roulette(scores: np.ndarray, draw: float) -> int:
    cum = np.cumsum(scores)
    total = cum[-1]
    if not (total > 0 and np.isfinite(total)):
        # all scores underflowed or overflowed; fall back to a uniform pick
        return min(int(draw * len(scores)), len(scores) - 1)
    return min(int(np.searchsorted(cum, draw * total, side="right")), len(scores) - 1)


def choose_next(
    state: AntState,
    candidates: list[int],
    tau: PheromoneMatrix,
    eta: EtaMatrix,
    params: AcoParams,
    rng: np.random.Generator,
) -> int:
    cands = sorted(candidates)
    scores = _scores(state.current, cands, tau, eta, params.beta)
    if rng.random() <= params.q0:
        return cands[int(np.argmax(scores))]  # first maximum = lowest id
    return cands[_roulette(scores, rng.random())]


def local_update(tau: PheromoneMatrix, r: int, s: int, rho: float) -> None:
    v = (1.0 - rho) * tau.values[r, s] + rho * tau.tau0
    tau.values[r, s] = tau.values[s, r] = v


def global_update(tau: PheromoneMatrix, best: JoinOrder, l_gb: float, rho: float) -> None:
    """Evaporate every arc, then deposit ``rho / l_gb`` on the n-1 arcs of ``best``."""
    diag = np.diagonal(tau.values).copy()
    tau.values *= 1.0 - rho
    np.fill_diagonal(tau.values, diag)
    deposit = rho / l_gb
    seq = best.sequence
    for r, s in zip(seq, seq[1:]):
        tau.values[r, s] += deposit
        tau.values[s, r] = tau.values[r, s]


def construct_tour(
    g: QueryGraph,
    tau: PheromoneMatrix,
    eta: EtaMatrix,
    params: AcoParams,
    rng: np.random.Generator,
    *,
    pending: list[tuple[int, int]] | None = None,
) -> tuple[JoinOrder, PlanCost]:
    """Build one complete tour.

    Local updates are applied to ``tau`` right after each step, unless
    ``pending`` is given, in which case the traversed arcs are appended to it
    and ``tau`` is left untouched.
    """
    n = g.n
    state = AntState.start(g, int(rng.integers(n)))
    strict = params.strict_connectivity
    for _ in range(n - 1):
        cands = candidate_set(g, state, strict)
        nxt = choose_next(state, cands, tau, eta, params, rng)
        r = state.current
        state.advance(g, nxt)
        if pending is None:
            local_update(tau, r, nxt, params.rho)
        else:
            pending.append((r, nxt))
    steps = tuple(state.steps)
    return JoinOrder(state.visited), PlanCost(sum(steps), steps)


def optimize(g: QueryGraph, params: AcoParams | None = None) -> OptResult:
    params = params or AcoParams()
    validate_graph(g)
    t0 = time.perf_counter()
    m = params.ants_for(g.n)
    eta = build_eta(g)
    tau = init_pheromone(g, params)
    best_order: JoinOrder | None = None
    best_cost: PlanCost | None = None
    trace = []
    evaluations = 0

    pool = ThreadPoolExecutor(params.workers) if params.parallel else None
    try:
        for it in range(params.iterations):
            if pool is None:
                tours = [construct_tour(g, tau, eta, params, ant_rng(params.seed, it, k)) for k in range(m)]
            else:
                snapshot = tau.copy()
                pendings: list[list[tuple[int, int]]] = [[] for _ in range(m)]

                def build(k: int, snapshot=snapshot, pendings=pendings, it=it):
                    return construct_tour(g, snapshot, eta, params, ant_rng(params.seed, it, k), pending=pendings[k])

                tours = list(pool.map(build, range(m)))
                for arcs in pendings:
                    for r, s in arcs:
                        local_update(tau, r, s, params.rho)

            for order, cost in tours:
                evaluations += 1
                if best_cost is None or cost.total < best_cost.total:
                    best_order, best_cost = order, cost
            assert best_order is not None and best_cost is not None
            global_update(tau, best_order, best_cost.total, params.rho)
            trace.append(best_cost.total)
    finally:
        if pool is not None:
            pool.shutdown()

    return OptResult(best_order, best_cost, tuple(trace), evaluations, time.perf_counter() - t0)

