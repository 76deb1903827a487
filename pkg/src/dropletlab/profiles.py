"""Confinement densities and their local models near the maximum.

The local model is the deficit q(x) = rho_max - rho(x) to leading order:
either the quadratic form x^T H x with H symmetric positive definite, or the
homogeneous power law rho1 |x|^p with p > 2.

Two global torus densities are provided for the full energy:

``periodic``
    rho(x) = rho_max - sum_ij H_ij s(x_i) s(x_j) with s(t) = sin(pi t) / pi,
    (diagonal H only, so the density is 1-periodic), or
    rho(x) = rho_max - rho1 (sum_i s(x_i)^2)^(p/2) for the power law.
    Smooth, uniquely maximised at 0, and q(x) + O(|x|^(s+2)) near 0.
``local``
    rho(x) = rho_max - q(x) exactly on the ball of radius 1/4, blended
    smoothly to a constant beyond 3/8.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .torus import wrap_array

KINDS = ("quadratic", "power_law")
DENSITY_MODES = ("periodic", "local")

_LOCAL_INNER = 0.25
_LOCAL_OUTER = 0.375


def _smoothstep(t):
    """C-infinity transition from 1 (t <= 0) to 0 (t >= 1)."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        g = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return g / (f + g)


@dataclass(frozen=True)
class ConfinementProfile:
    """Confinement density with its local model at the unique maximum 0.

    Build with :meth:`quadratic` or :meth:`power_law` rather than directly.
    """

    kind: str
    hessian: np.ndarray | None = None
    rho1: float | None = None
    exponent: float | None = None
    rho_max: float | None = None
    density_mode: str = "periodic"
    _hessian_eigs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.density_mode not in DENSITY_MODES:
            raise ValueError(f"density_mode must be one of {DENSITY_MODES}")
        if self.kind == "quadratic":
            H = np.array(self.hessian, dtype=float)
            if H.shape != (3, 3):
                raise ValueError("hessian must be 3x3")
            if not np.allclose(H, H.T, rtol=0, atol=1e-14 * max(1.0, np.abs(H).max())):
                raise ValueError("hessian must be symmetric")
            H = 0.5 * (H + H.T)
            eigs = np.linalg.eigvalsh(H)
            if eigs[0] <= 0:
                raise ValueError("hessian must be positive definite")
            if self.density_mode == "periodic" and np.any(H - np.diag(np.diag(H))):
                raise ValueError("periodic density mode supports diagonal hessians only")
            H.setflags(write=False)
            object.__setattr__(self, "hessian", H)
            object.__setattr__(self, "_hessian_eigs", eigs)
        else:
            if not (self.rho1 is not None and self.rho1 > 0):
                raise ValueError("power_law profile needs rho1 > 0")
            if not (self.exponent is not None and self.exponent > 2):
                raise ValueError("power_law exponent must exceed 2")
            object.__setattr__(self, "rho1", float(self.rho1))
            object.__setattr__(self, "exponent", float(self.exponent))
        floor = self._max_deficit()
        if self.rho_max is None:
            object.__setattr__(self, "rho_max", floor + 1.0)
        elif self.rho_max < floor:
            raise ValueError(f"rho_max={self.rho_max} makes the density negative (need >= {floor:.6g})")
        object.__setattr__(self, "rho_max", float(self.rho_max))

    @classmethod
    def quadratic(cls, hessian, rho_max=None, density_mode="periodic"):
        return cls("quadratic", hessian=hessian, rho_max=rho_max, density_mode=density_mode)

    @classmethod
    def isotropic(cls, h=1.0, rho_max=None, density_mode="periodic"):
        return cls.quadratic(h * np.eye(3), rho_max=rho_max, density_mode=density_mode)

    @classmethod
    def power_law(cls, rho1, exponent, rho_max=None, density_mode="periodic"):
        return cls("power_law", rho1=rho1, exponent=exponent, rho_max=rho_max,
                   density_mode=density_mode)

    @property
    def homogeneity(self) -> float:
        """Degree s with q(lambda x) = lambda^s q(x)."""
        return 2.0 if self.kind == "quadratic" else self.exponent

    def q(self, x):
        """Local model q at points of shape (..., 3)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "quadratic":
            return np.einsum("...i,ij,...j->...", x, self.hessian, x)
        r2 = np.einsum("...i,...i->...", x, x)
        return self.rho1 * r2 ** (0.5 * self.exponent)

    def grad_q(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "quadratic":
            return 2.0 * x @ self.hessian
        r2 = np.einsum("...i,...i->...", x, x)[..., None]
        return self.rho1 * self.exponent * r2 ** (0.5 * self.exponent - 1.0) * x

    def coercivity(self) -> float:
        """Constant C with q(x) >= C |x|^s."""
        return float(self._hessian_eigs[0]) if self.kind == "quadratic" else self.rho1

    def deficit(self, x):
        """rho_max - rho(x) for torus points of shape (..., 3)."""
        x = wrap_array(x)
        if self.density_mode == "periodic":
            s = np.sin(np.pi * x) / np.pi
            if self.kind == "quadratic":
                return np.einsum("...i,i->...", s * s, np.diag(self.hessian))
            r2 = np.einsum("...i,...i->...", s, s)
            return self.rho1 * r2 ** (0.5 * self.exponent)
        r = np.sqrt(np.einsum("...i,...i->...", x, x))
        w = _smoothstep((r - _LOCAL_INNER) / (_LOCAL_OUTER - _LOCAL_INNER))
        return w * self.q(x) + (1.0 - w) * self._local_cap()

    def density(self, x):
        return self.rho_max - self.deficit(x)

    def _local_cap(self) -> float:
        # largest q on the sphere of radius 3/8 keeps the blend monotone
        if self.kind == "quadratic":
            return float(self._hessian_eigs[-1]) * _LOCAL_OUTER**2
        return self.rho1 * _LOCAL_OUTER**self.exponent

    def _max_deficit(self) -> float:
        if self.density_mode == "local":
            return self._local_cap()
        if self.kind == "quadratic":
            return float(np.trace(self.hessian)) / np.pi**2
        return self.rho1 * (3.0 / np.pi**2) ** (0.5 * self.exponent)
