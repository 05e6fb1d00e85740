"""
Baselines side by side
======================
"""

import numpy as np

from antjoin import AcoParams, SAParams, WorkloadSpec, generate, optimize
from antjoin.baselines import dp_optimal, exhaustive, greedy_nn, random_sample, simulated_annealing

g = generate(WorkloadSpec(num_tables=9, topology="star", seed=1))
budget = 9 * 30

results = {
    "exhaustive": exhaustive(g),
    "dp": dp_optimal(g),
    "greedy(0)": greedy_nn(g, 0),
    "random": random_sample(g, budget, np.random.default_rng(0)),
    "sa": simulated_annealing(g, SAParams(steps=budget - 1), np.random.default_rng(0)),
}
aco = optimize(g, AcoParams(seed=0))
best = results["dp"].cost.total

for name, r in results.items():
    print(f"{name:11s} {r.cost.total:12.1f}  x{r.cost.total / best:.3f}  evals={r.evaluations}")
print(f"{'aco':11s} {aco.best_cost.total:12.1f}  x{aco.best_cost.total / best:.3f}  evals={aco.evaluations}")
