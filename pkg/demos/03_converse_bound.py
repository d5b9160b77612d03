"""
How far can any linear scheme go?
=================================

Split the per-cell DoF over triangles, relax to a tiny LP over the
frequencies of triangle configurations, and bound it through its dual.
"""

from fractions import Fraction

from cellia import (
    best_lambda,
    bound_report,
    build_graph,
    config_table,
    enumerate_configs,
    g_fn,
    integer_oracle,
    lp_solve_exact,
    s_fn,
)

# Configurations for two antennas and their (s, g) values.
D = enumerate_configs(2)
s = [s_fn(*c) for c in D]
g = [g_fn(*c, 2) for c in D]
for c, si, gi in zip(D, s, g):
    print(c.as_list(), "s =", si, "g =", gi)

# The boundary-free LP: two configurations mix to hit g.x = 0.
lp = lp_solve_exact(s, g, Fraction(1, 3), 0, 0)
print("\noptimum", lp.value, "at x =", [str(x) for x in lp.x])
lam, val = best_lambda(s, g)
print("best multiplier", lam, "gives the matching dual value", val)

# On a finite region the boundary adds a correction that fades like 1/sqrt|V|.
print("\n r   |V|   bound")
for r in (1, 2, 4, 8, 16):
    rep = bound_report(build_graph(r), 2)
    print(f"{r:2d} {rep['|V|']:5d}  {float(Fraction(rep['dual_bound'])):.4f}")

# Exhaustive search over integer DoF maps on the smallest region.
value, dof = integer_oracle(build_graph(1), 2)
print("\nr=1 integer optimum:", value)

# More antennas: per-triangle values and the best configuration.
for M in (3, 4):
    best = [row for row in config_table(M) if row["max"]]
    print(f"M={M}: max f_M = {best[0]['f']} at {[row['config'] for row in best]}")
