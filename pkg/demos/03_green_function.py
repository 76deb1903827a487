"""The periodic Green's function and its regular part.

G is evaluated by Ewald splitting.  Changing the splitting parameter moves
work between real and reciprocal space but must not change the answer, and
G minus the Newtonian kernel stays finite at the origin.
"""

import numpy as np

from dropletlab.green import GreenEvaluator, ball_pair_coulomb, default_evaluator

ev = default_evaluator()
print(f"g(0) = {ev.g0:.15f}")
x = np.array([[0.1, 0.0, 0.0], [0.2, 0.1, -0.3], [0.5, 0.5, 0.5]])
for alpha in (0.8 * np.pi, np.pi, 1.2 * np.pi):
    e = GreenEvaluator(ewald_alpha=alpha, real_cutoff=4, fourier_cutoff=10)
    print(f"alpha = {alpha:.4f}: G = " + "  ".join(f"{v:+.15f}" for v in e.green(x)))

print()
print("regular part g(x) = G(x) - 1/(4 pi |x|) near the origin")
for r in (1e-6, 1e-3, 1e-2, 0.1, 0.3):
    print(f"  |x| = {r:7.1e}: g = {ev.regular_part(np.array([r, 0.0, 0.0])):+.12f}")

print()
print("two balls: the Newtonian part equals point charges; the rest is g plus a size correction")
pair = ball_pair_coulomb(1.0, 0.02, np.array([0.05, 0, 0]), 1.0, 0.03, np.array([-0.05, 0, 0]))
print(f"  newtonian {pair.newtonian:.12f}  regular {pair.regular:.12f}  total {pair.total:.12f}")
