"""Where droplets sit: Coulomb repulsion against confinement.

Two equal droplets under q(x) = |x|^2 settle at +-d with d^3 = m / (16 pi);
the repulsion sums over ordered pairs, so each pair counts twice.  At every
critical point the repulsion R and confinement Q obey R = s Q, with s the
degree of q.  Larger clusters show several local minima across restarts.
"""

import math

from dropletlab.interaction import minimize_interaction, virial_check
from dropletlab.profiles import ConfinementProfile

iso = ConfinementProfile.isotropic(1.0)
for m in (1.0, 5.0, 20.0):
    opt = minimize_interaction([m, m], iso, restarts=4)
    d = opt.config.min_pair_distance() / 2
    print(f"m = {m:4.1f}: half separation {d:.10f}, (m/16pi)^(1/3) = {(m / (16 * math.pi)) ** (1 / 3):.10f}, "
          f"virial residual {virial_check(opt.config, iso)[2]:.1e}")

print()
quartic = ConfinementProfile.power_law(1.0, 4.0)
for n in (3, 5, 8):
    opt = minimize_interaction([1.0] * n, quartic, restarts=16, seed=0)
    R, Q, res = virial_check(opt.config, quartic)
    print(f"{n} droplets, q = |x|^4: F = {opt.energy:.8f}, R/Q = {R / Q:.8f}, "
          f"{len(opt.local_minima)} distinct local minima found")
