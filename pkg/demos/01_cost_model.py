"""
Pricing a join order
====================

A three-table chain A - B - C, and what each left-deep order costs when every
intermediate result is counted.
"""

from antjoin import make_graph, tour_cost
from antjoin.query_model import is_valid_order

g = make_graph([100, 10, 1000], [(0, 1, 0.1), (1, 2, 0.01)], ["A", "B", "C"])

# Starting at either end gives the same plan cost here; starting in the
# middle is legal too, it just joins the other end later.
for order in ([0, 1, 2], [2, 1, 0], [1, 0, 2], [0, 2, 1]):
    names = " -> ".join(g.names[i] for i in order)
    if not is_valid_order(g, order):
        print(f"{names:14s} invalid (needs a cross product)")
        continue
    c = tour_cost(g, order)
    print(f"{names:14s} steps={c.steps} total={c.total}")

# The last intermediate is the full join result, so it never depends on order.
print("relaxed final sizes:", {tour_cost(g, p, strict=False).steps[-1] for p in ([0, 2, 1], [2, 0, 1], [0, 1, 2])})
