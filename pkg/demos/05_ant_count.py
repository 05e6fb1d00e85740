"""
Half as many ants
=================

Compares one ant per table against ceil(n/2) ants at the same iteration count.
"""

from antjoin.bench import BenchConfig, ant_count_sweep, summarize
from antjoin.workload_gen import WorkloadSpec

scenarios = [WorkloadSpec(num_tables=n, topology="random_connected", seed=n) for n in (12, 20, 28)]
cfg = BenchConfig(scenarios, algorithms=("aco",), runs=5, workers=1)

for row in summarize(ant_count_sweep(cfg)):
    print(
        f"n={row['num_tables']:2d} {row['ant_policy']:16s} "
        f"cost={row['mean_best_cost']:10.4g} evals={row['mean_evaluations']:6.0f} "
        f"median_ms={row['median_elapsed_ms']:7.1f}"
    )
