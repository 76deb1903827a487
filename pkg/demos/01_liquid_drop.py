"""The energy of a single ball and why large droplets split.

A ball of mass m pays a surface term a m^(2/3) and a Coulomb self energy
b m^(5/3).  The surface term wins for small m, so e0 is concave there and
merging is favourable; past the inflection at m = 2 pi the Coulomb term takes
over.  Splitting one ball into two equal halves pays off once M exceeds a
closed-form threshold a little above 22.
"""

import math

from dropletlab.liquid_drop import (
    BALL,
    BINARY_SPLIT_MASS,
    CONCAVITY_THRESHOLD,
    e0_ball,
    e0_ball_second_derivative,
)

print(f"a = {BALL.a:.15f}   b = {BALL.b:.15f}   a/(5b) = {BALL.a / (5 * BALL.b):.15f}")
print(f"e0(1) = {e0_ball(1.0):.14f}")
print(f"inflection at m = {CONCAVITY_THRESHOLD:.12f} (2 pi = {2 * math.pi:.12f})")
print()
print(f"{'m':>8} {'e0(m)':>14} {'e0_second':>12}  shape")
for m in (1.0, 3.0, 6.0, 2 * math.pi, 7.0, 12.0):
    d2 = e0_ball_second_derivative(m)
    shape = "concave" if d2 < -1e-14 else ("flat" if abs(d2) <= 1e-14 else "convex")
    print(f"{m:8.4f} {e0_ball(m):14.8f} {d2:12.3e}  {shape}")

print()
print(f"one ball vs two halves (threshold {BINARY_SPLIT_MASS:.9f})")
for M in (15.0, 20.0, 22.0, 22.1, 25.0, 30.0):
    one, two = e0_ball(M), 2 * e0_ball(M / 2)
    print(f"  M = {M:5.1f}: one {one:10.5f}  two {two:10.5f}  -> {'split' if two < one else 'keep'}")
