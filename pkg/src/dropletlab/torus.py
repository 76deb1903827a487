"""Point arithmetic on the flat unit 3-torus [-1/2, 1/2)^3 / Z^3."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

# the 27 integer shifts with components in {-1, 0, 1}
SHIFTS = np.array(list(itertools.product((-1, 0, 1), repeat=3)), dtype=float)

MAX_DISTANCE = np.sqrt(3.0) / 2.0


def wrap_array(raw):
    """Wrap an array of shape (..., 3) into the canonical cell [-1/2, 1/2)."""
    raw = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(raw)):
        raise ValueError("torus coordinates must be finite")
    out = raw - np.floor(raw + 0.5)
    # floor(c + 0.5) can round up for c just below 1/2
    out = np.where(out >= 0.5, out - 1.0, out)
    out = np.where(out < -0.5, out + 1.0, out)
    return out


@dataclass(frozen=True)
class TorusPoint:
    """A point of the unit 3-torus with canonically wrapped coordinates."""

    coords: tuple[float, float, float]

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.shape != (3,):
            raise ValueError(f"expected 3 coordinates, got shape {c.shape}")
        object.__setattr__(self, "coords", tuple(float(v) for v in wrap_array(c)))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    def __add__(self, other: TorusPoint) -> TorusPoint:
        return TorusPoint(tuple(self.array + _as_array(other)))

    def __sub__(self, other: TorusPoint) -> TorusPoint:
        return TorusPoint(tuple(self.array - _as_array(other)))

    def __neg__(self) -> TorusPoint:
        return TorusPoint(tuple(-self.array))

    def norm(self) -> float:
        """Distance to the origin, i.e. the length of the minimal image."""
        return torus_distance(self, ORIGIN)


def _as_array(p) -> np.ndarray:
    return p.array if isinstance(p, TorusPoint) else np.asarray(p, dtype=float)


def wrap(raw) -> TorusPoint:
    """Return the torus point represented by three real coordinates.

    >>> wrap((0.75, -0.5, 1.0)).coords
    (-0.25, -0.5, 0.0)
    """
    return TorusPoint(tuple(np.asarray(raw, dtype=float)))


def minimal_image(disp) -> np.ndarray:
    """Minimal-image representative(s) of displacement vectors, shape (..., 3).

    Searches the 27 neighbouring shifts of the wrapped displacement so that
    ties on the cell boundary |c| = 1/2 resolve to a shortest vector.
    """
    d = wrap_array(disp)
    cand = d[..., None, :] + SHIFTS
    idx = np.argmin(np.einsum("...ki,...ki->...k", cand, cand), axis=-1)
    return np.take_along_axis(cand, idx[..., None, None], axis=-2)[..., 0, :]


def torus_distance(a, b) -> float:
    """Minimal-image Euclidean distance between two torus points."""
    d = minimal_image(_as_array(a) - _as_array(b))
    return float(np.sqrt(d @ d))


def pairwise_torus_distances(points) -> np.ndarray:
    """Matrix of minimal-image distances for an (n, 3) array of points."""
    p = np.asarray(points, dtype=float)
    d = minimal_image(p[:, None, :] - p[None, :, :])
    return np.sqrt(np.einsum("ijk,ijk->ij", d, d))


ORIGIN = TorusPoint((0.0, 0.0, 0.0))
