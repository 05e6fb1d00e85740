"""
The seven-size sweep
====================

Runs a reduced version of configs/paper_repro.json (5 runs instead of 20) and
prints mean cost relative to greedy for each size.
"""

from collections import defaultdict

from antjoin.bench import BenchConfig, run_benchmark
from antjoin.workload_gen import table1_workloads

cfg = BenchConfig(table1_workloads(seed=100), algorithms=("aco", "greedy", "random"), runs=5, workers=1)
recs = run_benchmark(cfg)

cost = defaultdict(list)
for r in recs:
    cost[r.num_tables, r.algorithm].append(r.best_cost)

print(" n   aco/greedy  random/greedy")
for spec in cfg.scenarios:
    n = spec.num_tables
    g = sum(cost[n, "greedy"])
    print(f"{n:2d}   {sum(cost[n, 'aco']) / g:9.3f}  {sum(cost[n, 'random']) / g:12.3f}")
