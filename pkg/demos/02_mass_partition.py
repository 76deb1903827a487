"""Splitting a total mass among several balls.

The optimal split is a KKT point: masses below the admissible cap share a
common marginal energy e0'.  Because e0' rises and then falls, at most one
mass can sit on the concave side of 2 pi.  The cap stands in for the
(unknown) largest mass for which a liquid-drop minimiser exists.
"""

import math

from dropletlab.liquid_drop import CONCAVITY_THRESHOLD, e0_ball, kkt_residual, optimal_partition

for M, cap in ((10.0, 4 * math.pi), (25.0, 100.0), (30.0, 100.0), (30.0, 4 * math.pi), (50.0, 4 * math.pi)):
    p = optimal_partition(M, n_max=8, admissible_cap=cap)
    small = sum(m < CONCAVITY_THRESHOLD for m in p.masses)
    print(f"M = {M:5.1f}, cap = {cap:7.3f}: {p.n} droplet(s) "
          f"[{', '.join(f'{m:.4f}' for m in p.masses)}]")
    print(f"    energy {p.objective:.6f} (single ball {e0_ball(M):.6f}), "
          f"KKT residual {kkt_residual(p, cap):.1e}, masses below 2 pi: {small}")
