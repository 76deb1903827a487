"""Liquid-drop (Gamow) energy restricted to balls, and optimal mass splitting.

For a ball of volume m the perimeter is a m^(2/3) and the Newtonian self
energy (kernel 1/(4 pi |x - y|), full double integral) is b m^(5/3) with

    a = 3 (4 pi / 3)^(1/3),      b = (3 / (4 pi))^(5/3) * 8 pi / 15.

a / b = 10 pi, so the second derivative of the ball energy changes sign at
m = 2 pi and an equal binary split first pays off at
10 pi (2^(1/3) - 1) / (1 - 2^(-2/3)) ~ 22.07.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.optimize import brentq


def _coefficients() -> tuple[float, float]:
    with mpmath.workdps(40):
        pi = mpmath.pi
        a = 3 * mpmath.cbrt(4 * pi / 3)
        b = mpmath.power(3 / (4 * pi), mpmath.mpf(5) / 3) * 8 * pi / 15
        return float(a), float(b)


@dataclass(frozen=True)
class BallModel:
    """Coefficients of e0(m) = a m^(2/3) + b m^(5/3) for balls."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("ball-model coefficients must be positive")

    @property
    def inflection_mass(self) -> float:
        """Root of the second derivative, 2a/(10b) = 2 pi."""
        return self.a / (5.0 * self.b)


BALL = BallModel(*_coefficients())

CONCAVITY_THRESHOLD = 2.0 * np.pi

# e0(M) = 2 e0(M/2) exactly here
BINARY_SPLIT_MASS = 10.0 * np.pi * (2.0 ** (1 / 3) - 1.0) / (1.0 - 2.0 ** (-2 / 3))

DEFAULT_ADMISSIBLE_CAP = 4.0 * np.pi


def _check_mass(m):
    m = np.asarray(m, dtype=float)
    if np.any(~np.isfinite(m)) or np.any(m <= 0):
        raise ValueError("mass must be positive and finite")
    return m


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def e0_ball(m):
    """Liquid-drop energy of the ball of volume ``m`` (scalar or array)."""
    m = _check_mass(m)
    return _out(BALL.a * m ** (2 / 3) + BALL.b * m ** (5 / 3))


def e0_ball_derivative(m):
    m = _check_mass(m)
    return _out(2 * BALL.a / 3 * m ** (-1 / 3) + 5 * BALL.b / 3 * m ** (2 / 3))


def e0_ball_second_derivative(m):
    """-(2a/9) m^(-4/3) + (10b/9) m^(-1/3); negative exactly for m < 2 pi."""
    m = _check_mass(m)
    return _out(-2 * BALL.a / 9 * m ** (-4 / 3) + 10 * BALL.b / 9 * m ** (-1 / 3))


def ball_perimeter(m):
    """Surface area of the ball of volume ``m``."""
    m = _check_mass(m)
    r = (3 * m / (4 * np.pi)) ** (1 / 3)
    return _out(4 * np.pi * r * r)


def ball_radius(m):
    m = _check_mass(m)
    return _out((3 * m / (4 * np.pi)) ** (1 / 3))


@dataclass(frozen=True)
class MassPartition:
    masses: tuple[float, ...]
    total: float

    def __post_init__(self):
        if not self.masses or any(not m > 0 for m in self.masses):
            raise ValueError("partition masses must be positive")
        if abs(sum(self.masses) - self.total) > 1e-12 * max(1.0, abs(self.total)):
            raise ValueError(f"masses sum to {sum(self.masses)!r}, expected {self.total!r}")

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def objective(self) -> float:
        return float(np.sum(e0_ball(np.array(self.masses))))


def kkt_residual(partition: MassPartition, admissible_cap: float = DEFAULT_ADMISSIBLE_CAP) -> float:
    """Relative spread of e0' over the masses that are not at the cap."""
    m = np.array(partition.masses)
    free = m[m < admissible_cap * (1 - 1e-12)]
    if len(free) < 2:
        return 0.0
    slopes = e0_ball_derivative(free)
    mean = float(np.mean(slopes))
    return float(np.max(np.abs(slopes - mean)) / abs(mean))


def _small_partner(large):
    """The mass s <= 2 pi with e0'(s) = e0'(large), for large >= 2 pi.

    e0' decreases on (0, 2 pi) from +inf, so the root is unique; found by
    vectorised bisection.
    """
    large = np.asarray(large, dtype=float)
    target = e0_ball_derivative(large)
    lo = np.minimum((2 * BALL.a / (3 * target)) ** 3, CONCAVITY_THRESHOLD)
    hi = np.full_like(lo, CONCAVITY_THRESHOLD)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = e0_ball_derivative(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= 4e-16 * hi):
            break
    return _out(0.5 * (lo + hi))


def _interior_groups(rest: float, j: int, cap: float, resolution: int) -> list[list[float]]:
    """KKT-stationary ways to place ``rest`` into ``j`` free masses <= cap.

    Stationarity forces a common value of e0'; since e0' is convex-concave
    around 2 pi each free mass is either the small or the large root, and
    optimality admits at most one small mass.  Candidates: all equal, or one
    small plus j - 1 equal large masses (found by scanning the large mass).
    """
    out = []
    if rest / j <= cap * (1 + 1e-12):
        out.append([min(rest / j, cap)] * j)
    if j >= 2 and cap > CONCAVITY_THRESHOLD:
        hi = min(cap, rest / (j - 1))
        if hi > CONCAVITY_THRESHOLD:
            def excess(ell):
                return _small_partner(ell) + (j - 1) * ell - rest

            grid = np.linspace(CONCAVITY_THRESHOLD, hi, resolution + 1)
            vals = excess(grid)
            for k in range(resolution):
                if vals[k] == 0.0:
                    roots = [grid[k]]
                elif vals[k] * vals[k + 1] < 0:
                    roots = [brentq(excess, grid[k], grid[k + 1], xtol=1e-14)]
                else:
                    continue
                for ell in roots:
                    s = rest - (j - 1) * ell
                    if s > 0:
                        out.append([s] + [ell] * (j - 1))
    return out


def optimal_partition(
    M: float,
    n_max: int,
    admissible_cap: float = DEFAULT_ADMISSIBLE_CAP,
    resolution: int = 512,
) -> MassPartition:
    """Split ``M`` into at most ``n_max`` balls of mass <= ``admissible_cap``.

    Minimises the sum of ball energies.  Every candidate is a KKT point of
    the separable problem: some masses sit at the cap, the others share a
    common marginal energy.  Ties go to the smaller droplet count.

    Raises
    ------
    ValueError
        If ``n_max * admissible_cap < M`` or an argument is out of range.
    """
    if not (M > 0 and admissible_cap > 0) or n_max < 1:
        raise ValueError("need M > 0, admissible_cap > 0 and n_max >= 1")
    if n_max * admissible_cap < M * (1 - 1e-14):
        raise ValueError(
            f"infeasible: {n_max} droplets of mass <= {admissible_cap:g} cannot hold M = {M:g}"
        )

    best = None
    for n in range(1, n_max + 1):
        for k in range(n + 1):
            rest = M - k * admissible_cap
            j = n - k
            if j == 0:
                groups = [[]] if abs(rest) <= 1e-12 * M else []
            elif rest <= 0:
                groups = []
            else:
                groups = _interior_groups(rest, j, admissible_cap, resolution)
            for g in groups:
                masses = [admissible_cap] * k + g
                masses[-1] = M - sum(masses[:-1])
                if masses[-1] <= 0:
                    continue
                value = float(np.sum(e0_ball(np.array(masses))))
                if best is None or value < best[0] - 1e-12 * abs(best[0]):
                    best = (value, masses)
    if best is None:
        raise ValueError("no feasible partition found")
    masses = tuple(sorted(best[1], reverse=True))
    return MassPartition(masses=masses, total=M)
