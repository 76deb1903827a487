"""Mean-zero periodic Green's function of the Laplacian on the unit 3-torus.

G solves -Laplace(G) = delta_0 - 1 with zero mean, so that

    G(x) = sum_{k != 0} exp(2 pi i k.x) / (4 pi^2 |k|^2).

It is evaluated by Ewald splitting with a Gaussian of width parameter
``ewald_alpha``::

    G(x) = sum_n erfc(sqrt(a)|x+n|) / (4 pi |x+n|)
         + sum_{k != 0} exp(-pi^2 |k|^2 / a) cos(2 pi k.x) / (4 pi^2 |k|^2)
         - 1 / (4 a)

The last constant removes the mean of the screened real-space part.  Near the
origin G = 1/(4 pi |x|) + g(x) with g smooth; away from the lattice points
Laplace(G) = 1, and the same holds for g on the open ball of radius 1/2.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import erf, erfc

from .errors import ConvergenceError, OverlapError, SingularConfigurationError
from .torus import TorusPoint, minimal_image, wrap_array

FOUR_PI = 4.0 * np.pi

# radius of the neighbourhood of 0 on which the regular part is requested
REGULAR_RADIUS = 3.0 / 8.0

_CHUNK = 512


def _as_points(x) -> tuple[np.ndarray, bool]:
    if isinstance(x, TorusPoint):
        return np.array([x.coords]), True
    arr = np.asarray(x, dtype=float)
    if arr.shape == (3,):
        return arr[None, :], True
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"expected a point or an (N, 3) array, got shape {arr.shape}")
    return arr, False


def _cube(radius: int) -> np.ndarray:
    r = range(-radius, radius + 1)
    return np.array(list(itertools.product(r, r, r)), dtype=float)


@dataclass(frozen=True)
class GreenEvaluator:
    """Ewald evaluator for the periodic Green's function and its regular part.

    Parameters
    ----------
    ewald_alpha : float
        Gaussian splitting parameter (inverse length squared).
    real_cutoff : int
        Real-space images with max-norm up to this value are summed.
    fourier_cutoff : int
        Reciprocal vectors with max-norm up to this value are summed.
    tolerance : float
        Target absolute accuracy.  Construction fails with
        :class:`ConvergenceError` when the truncation estimate exceeds it.
    """

    ewald_alpha: float = np.pi
    real_cutoff: int = 3
    fourier_cutoff: int = 8
    tolerance: float = 1e-9
    _images: np.ndarray = field(init=False, repr=False, compare=False)
    _kvecs: np.ndarray = field(init=False, repr=False, compare=False)
    _kweights: np.ndarray = field(init=False, repr=False, compare=False)
    g0: float = field(init=False, compare=False)
    truncation_estimate: float = field(init=False, compare=False)

    def __post_init__(self):
        if not self.ewald_alpha > 0:
            raise ValueError("ewald_alpha must be positive")
        if self.real_cutoff < 1 or self.fourier_cutoff < 1:
            raise ValueError("cutoffs must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

        estimate = self._tail_estimate()
        object.__setattr__(self, "truncation_estimate", estimate)
        if estimate > self.tolerance:
            raise ConvergenceError(
                f"Ewald truncation error estimate {estimate:.2e} exceeds tolerance "
                f"{self.tolerance:.2e}; increase real_cutoff/fourier_cutoff"
            )

        images = _cube(self.real_cutoff)
        # nearest image first; the regular part treats it separately
        order = np.argsort(np.einsum("ij,ij->i", images, images), kind="stable")
        object.__setattr__(self, "_images", images[order])

        k = _cube(self.fourier_cutoff)
        # one representative of each +-k pair, doubled in the weights
        first = np.argmax(k != 0, axis=1)
        keep = np.any(k != 0, axis=1) & (k[np.arange(len(k)), first] > 0)
        k = k[keep]
        k2 = np.einsum("ij,ij->i", k, k)
        weights = 2.0 * np.exp(-np.pi**2 * k2 / self.ewald_alpha) / (4.0 * np.pi**2 * k2)
        object.__setattr__(self, "_kvecs", 2.0 * np.pi * k)
        object.__setattr__(self, "_kweights", weights)
        object.__setattr__(self, "g0", float(self._regular(np.zeros((1, 3)))[0]))

    def _tail_estimate(self) -> float:
        a = self.ewald_alpha
        real = 0.0
        for s in range(self.real_cutoff + 1, self.real_cutoff + 12):
            r = s - 0.5
            real += (24 * s * s + 2) * erfc(np.sqrt(a) * r) / (FOUR_PI * r)
        recip = 0.0
        for s in range(self.fourier_cutoff + 1, self.fourier_cutoff + 12):
            recip += (24 * s * s + 2) * np.exp(-np.pi**2 * s * s / a) / (4 * np.pi**2 * s * s)
        return float(real + recip)

    def _regular(self, x: np.ndarray) -> np.ndarray:
        """g(x) = G(x) - 1/(4 pi |x|) for wrapped points (minimal image = x)."""
        sa = np.sqrt(self.ewald_alpha)
        out = np.empty(len(x))
        for start in range(0, len(x), _CHUNK):
            xc = x[start:start + _CHUNK]
            disp = xc[:, None, :] + self._images[None, 1:, :]
            r = np.sqrt(np.einsum("ijk,ijk->ij", disp, disp))
            real = np.sum(erfc(sa * r) / (FOUR_PI * r), axis=1)

            r0 = np.sqrt(np.einsum("ij,ij->i", xc, xc))
            near = np.empty_like(r0)
            small = r0 < 1e-8
            near[small] = sa / (2.0 * np.pi**1.5) * (1.0 - self.ewald_alpha * r0[small] ** 2 / 3.0)
            near[~small] = erf(sa * r0[~small]) / (FOUR_PI * r0[~small])

            recip = np.cos(xc @ self._kvecs.T) @ self._kweights
            out[start:start + _CHUNK] = real - near + recip - 1.0 / (4.0 * self.ewald_alpha)
        return out

    def green(self, x):
        """Evaluate G at a torus point or at each row of an (N, 3) array.

        Raises :class:`SingularConfigurationError` at the lattice points.
        """
        pts, scalar = _as_points(x)
        w = wrap_array(pts)
        r = np.sqrt(np.einsum("ij,ij->i", w, w))
        if np.any(r == 0.0):
            raise SingularConfigurationError("G is singular at x = 0 on the torus")
        vals = self._regular(w) + 1.0 / (FOUR_PI * r)
        return float(vals[0]) if scalar else vals

    def regular_part(self, x):
        """Evaluate g = G - 1/(4 pi d) on the ball of radius 3/8 about 0.

        ``d`` is the minimal-image distance to the origin; at x = 0 the finite
        limit ``g0`` is returned.
        """
        pts, scalar = _as_points(x)
        w = wrap_array(pts)
        r = np.sqrt(np.einsum("ij,ij->i", w, w))
        if np.any(r >= REGULAR_RADIUS):
            raise ValueError(
                f"regular part requested at distance {r.max():.4g} >= {REGULAR_RADIUS}"
            )
        vals = self._regular(w)
        return float(vals[0]) if scalar else vals


@functools.lru_cache(maxsize=1)
def default_evaluator() -> GreenEvaluator:
    return GreenEvaluator()


class PairCoulomb(NamedTuple):
    """Coulomb cross energy of two uniform balls, split as G = Newtonian + g."""

    newtonian: float
    regular: float

    @property
    def total(self) -> float:
        return self.newtonian + self.regular


def _check_ball(m, r):
    if not (m > 0 and r > 0):
        raise ValueError(f"mass and radius must be positive, got m={m}, r={r}")


def ball_self_coulomb(m: float, r: float) -> float:
    """Newtonian self energy of a uniform ball of mass ``m`` and radius ``r``.

    Equals the double integral of rho(x) rho(y) / (4 pi |x - y|) with
    rho = m / (4/3 pi r^3), which reduces to 3 m^2 / (10 pi r).  For unit
    density and unit radius this is 8 pi / 15.
    """
    _check_ball(m, r)
    return 3.0 * m * m / (10.0 * np.pi * r)


def ball_self_regular(m: float, r: float, evaluator: GreenEvaluator | None = None) -> float:
    """Self energy of a uniform ball against the regular part g.

    Because Laplace(g) = 1 on the ball of radius 1/2, averaging over two
    independent points of the ball gives exactly g(0) + r^2/5, as long as
    2r < 1/2.
    """
    _check_ball(m, r)
    if r >= 0.25:
        raise ValueError("ball radius must be below 1/4 for the local expansion of g")
    ev = evaluator or default_evaluator()
    return m * m * (ev.g0 + r * r / 5.0)


def ball_pair_coulomb(m1, r1, c1, m2, r2, c2, evaluator: GreenEvaluator | None = None) -> PairCoulomb:
    """Periodic Coulomb interaction of two disjoint uniform balls.

    The full kernel G has constant Laplacian 1 off the lattice, so the double
    ball average is exactly G(c1 - c2) + (r1^2 + r2^2)/10 whenever the balls do
    not meet under any periodic image.  The Newtonian part reduces to point
    charges at the minimal-image distance; the rest is reported as
    ``regular``.
    """
    _check_ball(m1, r1)
    _check_ball(m2, r2)
    disp = minimal_image(np.asarray(_coords(c1)) - np.asarray(_coords(c2)))
    d = float(np.sqrt(disp @ disp))
    if d <= r1 + r2:
        raise OverlapError(f"balls overlap: center distance {d:.6g} <= r1 + r2 = {r1 + r2:.6g}")
    ev = evaluator or default_evaluator()
    g = float(ev._regular(wrap_array(disp)[None, :])[0])
    newtonian = m1 * m2 / (FOUR_PI * d)
    regular = m1 * m2 * (g + (r1 * r1 + r2 * r2) / 10.0)
    return PairCoulomb(newtonian, regular)


def _coords(c):
    return c.coords if isinstance(c, TorusPoint) else c


def empirical_singularity_constant(
    evaluator: GreenEvaluator | None = None, samples: int = 4096, seed: int = 0
) -> float:
    """Smallest C with |G(x)| <= C/d(x) + C over a random sample of points."""
    ev = evaluator or default_evaluator()
    rng = np.random.default_rng(seed)
    x = rng.uniform(-0.5, 0.5, size=(samples, 3))
    d = np.sqrt(np.einsum("ij,ij->i", x, x))
    return float(np.max(np.abs(ev.green(x)) / (1.0 / d + 1.0)))
