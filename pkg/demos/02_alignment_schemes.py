"""
Aligning interference with two transmit antennas
================================================

Draw seeded Gaussian channels, build the one-shot beamformers for the three
antenna configurations, and let the independent verifier check them.
"""

import numpy as np

from cellia import build_graph, certify_alignment, generate, measure_rates, solve

g = build_graph(3)

for M, N in [(2, 2), (2, 3), (2, 4)]:
    ch = generate(g, M, N, seed=42)
    sol = solve(g, ch)
    cert = certify_alignment(g, ch, sol, tol=1e-9)
    print(f"{M}x{N}: average DoF {sol.average_dof} ({float(sol.average_dof):.3f}), "
          f"certified={cert.passed}, worst residual {cert.max_residual:.1e}")

# At high SNR the rate grows like d*log2(P).  Sweep the power and watch the
# slope settle on the assigned DoF.
ch = generate(g, 2, 2, seed=42)
sol = solve(g, ch)
powers = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6]
rep = measure_rates(g, ch, sol, powers)
print("\nP        avg rate (bits/s/Hz)")
for p, r in zip(powers, rep.average_rate):
    print(f"{p:8.0e} {r:7.3f}")
slopes = np.diff(rep.average_rate) / np.diff(np.log2(powers))
print("local slopes:", np.round(slopes, 3), " target 7/9 =", round(7 / 9, 3))

# The scheme leans on decoded-message cancellation.  Without it, the reverse
# direction of every edge interferes and alignment falls apart.
ch2 = generate(g, 2, 2, seed=42, both_directions=True)
cert = certify_alignment(g, ch2, solve(g, ch2), cancellation=False)
print(f"\nwithout cancellation: certified={cert.passed}, {len(cert.failed_edges)} edges leak")
