"""Independent reference computations used by the tests.

None of these import the package; they re-derive the quantities from
first principles with deliberately different numerics.
"""

from __future__ import annotations

import math

import numpy as np


def fourier_green(points, cutoff: int = 64, smoothing: float = 1.3e-4) -> np.ndarray:
    """Mean-zero periodic Green's function by a direct lattice sum over k.

    The plain cube-truncated sum converges like 1/cutoff and oscillates
    strongly on the coordinate axes, so each mode is damped by the heat
    factor exp(-4 pi^2 |k|^2 t).  The damped sum equals G + t up to a term
    of order erfc(|x| / sqrt(4t)), negligible for |x| >= 0.1.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.arange(-cutoff, cutoff + 1, dtype=float)
    k = np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)
    k2 = np.einsum("ij,ij->i", k, k)
    k, k2 = k[k2 > 0], k2[k2 > 0]
    weight = np.exp(-4.0 * math.pi**2 * k2 * smoothing) / (4.0 * math.pi**2 * k2)
    keep = weight > 1e-30
    k, weight = k[keep], weight[keep]
    out = np.empty(len(pts))
    for i, x in enumerate(pts):
        out[i] = weight @ np.cos(2.0 * math.pi * (k @ x))
    return out - smoothing


def uniform_ball(rng, n: int) -> np.ndarray:
    """n uniform samples from the unit ball (Gaussian direction, r = U^(1/3))."""
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.random(n)[:, None] ** (1.0 / 3.0)


def monte_carlo_ball_coulomb(samples: int = 10_000_000, seed: int = 12345, chunk: int = 1_000_000):
    """Estimate of int int_{B1 x B1} dx dy / (4 pi |x - y|) and its standard error."""
    rng = np.random.default_rng(seed)
    vol = 4.0 * math.pi / 3.0
    total = total_sq = 0.0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        d = np.linalg.norm(uniform_ball(rng, n) - uniform_ball(rng, n), axis=1)
        f = vol * vol / (4.0 * math.pi * d)
        total += f.sum()
        total_sq += (f * f).sum()
        done += n
    mean = total / samples
    var = total_sq / samples - mean * mean
    return mean, math.sqrt(var / samples)


def grid_crossover(func, lo: float, hi: float, points: int = 20001, refine: int = 200) -> float:
    """First sign change of ``func`` on [lo, hi] by a grid scan, then bisection."""
    x = np.linspace(lo, hi, points)
    y = np.array([func(v) for v in x])
    idx = np.nonzero(np.sign(y[1:]) != np.sign(y[:-1]))[0]
    if len(idx) == 0:
        raise ValueError("no sign change on the grid")
    a, b = x[idx[0]], x[idx[0] + 1]
    fa = func(a)
    for _ in range(refine):
        mid = 0.5 * (a + b)
        fm = func(mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def e0_reference(m):
    """Ball energy from radius and Coulomb integral, in plain floats."""
    r = (3.0 * m / (4.0 * math.pi)) ** (1.0 / 3.0)
    return 4.0 * math.pi * r * r + 3.0 * m * m / (10.0 * math.pi * r)


def central_difference(func, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Fourth-order central-difference gradient of a scalar function of an array."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    flat = grad.reshape(-1)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h
        e = e.reshape(x.shape)
        flat[i] = (-func(x + 2 * e) + 8 * func(x + e) - 8 * func(x - e) + func(x - 2 * e)) / (12 * h)
    return grad


def random_rotation(rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
