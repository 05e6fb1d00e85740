"""
An ant colony on a random query
===============================
"""

from antjoin import AcoParams, WorkloadSpec, dp_optimal, generate, optimize

g = generate(WorkloadSpec(num_tables=12, topology="random_connected", seed=4))
print(f"{g.n} tables, {len(g.edges)} join predicates")

# defaults: one ant per table, 30 iterations, beta=2, rho=0.1, q0=0.9
r = optimize(g, AcoParams(seed=42))
opt = dp_optimal(g)

print("colony :", " -> ".join(g.names[i] for i in r.best_order), f"{r.best_cost.total:.4g}")
print("optimum:", " -> ".join(g.names[i] for i in opt.order), f"{opt.cost.total:.4g}")
print(f"ratio {r.best_cost.total / opt.cost.total:.3f} after {r.evaluations} tour evaluations")

# best-so-far per iteration
for it in range(0, len(r.trace), 5):
    print(f"  iter {it:2d}  {r.trace[it]:.4g}")

# parallel mode gives the same answer on every rerun, though not the same as sequential
p = optimize(g, AcoParams(seed=42, parallel=True))
print("parallel rerun identical:", p == optimize(g, AcoParams(seed=42, parallel=True)))
