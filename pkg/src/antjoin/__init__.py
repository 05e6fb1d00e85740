"""Join-order optimization with an Ant Colony System, plus exact and heuristic baselines."""

from .aco import AcoParams, OptResult, optimize
from .baselines import SAParams, dp_optimal, exhaustive, greedy_nn, random_sample, simulated_annealing
from .cost_model import build_eta, tour_cost
from .errors import AntJoinError
from .query_model import JoinOrder, PlanCost, QueryGraph, make_graph, parse_graph, render_graph
from .workload_gen import WorkloadSpec, generate, table1_scenarios

__all__ = [
    "AcoParams",
    "AntJoinError",
    "JoinOrder",
    "OptResult",
    "PlanCost",
    "QueryGraph",
    "SAParams",
    "WorkloadSpec",
    "build_eta",
    "dp_optimal",
    "exhaustive",
    "generate",
    "greedy_nn",
    "make_graph",
    "optimize",
    "parse_graph",
    "random_sample",
    "render_graph",
    "simulated_annealing",
    "table1_scenarios",
    "tour_cost",
]
