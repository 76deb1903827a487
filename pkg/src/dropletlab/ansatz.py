"""Full torus energy of the spherical-droplet test configuration.

The configuration places uniform balls of blown-up radius r_i = (3 m_i / 4 pi)^(1/3)
at physical centers delta * p_i with physical radius eta * r_i and density
eta^-3.  For such a configuration the energy

    E(v) = eta * Per(v) + eta * int int G(x - y) v(x) v(y) - int v rho

splits into closed-form pieces:

* perimeter: sum 4 pi r_i^2, independent of eta;
* Newtonian self energy: 3 m_i^2 / (10 pi r_i), independent of eta;
* regular self energy: eta m_i^2 (g(0) + (eta r_i)^2 / 5);
* cross terms over ordered pairs: eta m_i m_j [1 / (4 pi d_ij) + g(c_i - c_j)
  + (eta r_i)^2 / 10 + (eta r_j)^2 / 10];
* confinement: -sum m_i * (ball average of rho), by Gauss-Legendre quadrature.

Only the confinement term is approximate.  With delta = eta^(1/(s+1)),
s the homogeneity of the local model q, the leading expansion is

    E = sum e0(m_i) - M rho_max + eta^(s/(s+1)) F(p) + o(eta^(s/(s+1))).

(Starting from the physical Ohta-Kawasaki energy with interface width, the
droplet regime fixes the parameters so that every bracket above is O(1); that
unscaled energy is not modelled here.)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, OverlapError
from .green import GreenEvaluator, ball_pair_coulomb, ball_self_coulomb, ball_self_regular, default_evaluator
from .interaction import DropletConfig, energy_components, interaction_energy
from .liquid_drop import BALL, ball_radius, e0_ball
from .profiles import ConfinementProfile

CONTAINMENT_RADIUS = 0.25

CSV_COLUMNS = (
    "eta", "delta", "perimeter", "nl_self_newt", "nl_self_reg",
    "nl_cross_newt", "nl_cross_reg", "confinement", "total", "residual",
)

MAX_QUAD_ORDER = 128


def delta_rule(eta: float, profile: ConfinementProfile) -> float:
    """Separation scale eta^(1/(s+1)); eta^(1/3) for a quadratic maximum."""
    return eta ** (1.0 / (profile.homogeneity + 1.0))


def interaction_exponent(profile: ConfinementProfile) -> float:
    """Order s/(s+1) at which droplet interactions enter the energy."""
    s = profile.homogeneity
    return s / (s + 1.0)


def two_term_optimal_delta(eta: float, config: DropletConfig, profile: ConfinementProfile) -> float:
    """Minimiser over delta of eta R / delta + delta^s Q."""
    R, Q = energy_components(config, profile)
    s = profile.homogeneity
    return (eta * R / (s * Q)) ** (1.0 / (s + 1.0))


@dataclass(frozen=True)
class AnsatzSpec:
    """Droplet test configuration at scale ``eta`` with separation ``delta``.

    ``config.positions`` are rescaled centers p_i; physical centers are
    ``delta * p_i``.  Construction checks that the physical balls are
    disjoint, lie inside the ball of radius 1/4, and that the droplet size
    is below a quarter of the smallest center spacing.
    """

    eta: float
    delta: float
    config: DropletConfig
    profile: ConfinementProfile
    evaluator: GreenEvaluator | None = field(default=None, compare=False)
    quad_order: int = 16
    quad_rtol: float = 1e-12

    def __post_init__(self):
        if not (0 < self.eta < 1):
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.quad_order < 2:
            raise ValueError("quad_order must be at least 2")
        r = self.physical_radii
        c = self.centers
        reach = np.linalg.norm(c, axis=1) + r
        if np.any(reach >= CONTAINMENT_RADIUS):
            raise ValueError(
                f"droplets leave the ball of radius {CONTAINMENT_RADIUS}: max reach {reach.max():.4g}"
            )
        if self.config.n > 1:
            d = np.linalg.norm(c[:, None] - c[None], axis=-1)
            gap = d - (r[:, None] + r[None, :])
            np.fill_diagonal(gap, np.inf)
            if gap.min() <= 0:
                raise OverlapError("droplet balls overlap")
            spacing = self.delta * self.config.min_pair_distance()
            if r.max() >= spacing / 4:
                raise ValueError(
                    f"droplet radius {r.max():.4g} is not below a quarter of the spacing {spacing:.4g}"
                )

    @property
    def radii(self) -> np.ndarray:
        return np.asarray(ball_radius(self.config.masses))

    @property
    def physical_radii(self) -> np.ndarray:
        return self.eta * self.radii

    @property
    def centers(self) -> np.ndarray:
        return self.delta * self.config.positions


@dataclass(frozen=True)
class EnergyBreakdown:
    """Term-by-term energy of the droplet configuration.

    ``total`` is the left-to-right float sum of the six components.
    ``excess`` is total minus (sum e0(m_i) - M rho_max), computed without the
    cancellation of the rho_max terms.
    """

    perimeter_term: float
    nonlocal_self_newtonian: float
    nonlocal_self_regular: float
    nonlocal_cross_newtonian: float
    nonlocal_cross_regular: float
    confinement_term: float
    total: float
    excess: float = field(compare=False)
    quadrature_order: int = field(compare=False)
    quadrature_change: float = field(compare=False)

    def components(self) -> tuple[float, ...]:
        return (
            self.perimeter_term,
            self.nonlocal_self_newtonian,
            self.nonlocal_self_regular,
            self.nonlocal_cross_newtonian,
            self.nonlocal_cross_regular,
            self.confinement_term,
        )


@lru_cache(maxsize=16)
def _ball_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre rule for averages over the unit ball.

    Radial x polar-cosine x azimuth; the periodic azimuth uses the
    trapezoid rule with 2 * order nodes.  Weights sum to one.
    """
    t, wt = np.polynomial.legendre.leggauss(order)
    rad = 0.5 * (t + 1.0)
    wrad = 0.5 * wt * 3.0 * rad**2
    mu, wmu = t, 0.5 * wt
    phi = np.pi * (np.arange(2 * order) + 0.5) / order
    wphi = np.full(2 * order, 0.5 / order)
    R, MU, PHI = np.meshgrid(rad, mu, phi, indexing="ij")
    S = np.sqrt(1.0 - MU**2)
    pts = np.stack([R * S * np.cos(PHI), R * S * np.sin(PHI), R * MU], axis=-1).reshape(-1, 3)
    w = (wrad[:, None, None] * wmu[None, :, None] * wphi[None, None, :]).reshape(-1)
    return pts, w


def ball_average(func, center, radius: float, order: int) -> float:
    """Average of ``func`` over the ball, with a fixed-order tensor rule."""
    pts, w = _ball_rule(order)
    return float(w @ func(np.asarray(center) + radius * pts))


def _average_deficits(spec: AnsatzSpec) -> tuple[np.ndarray, int, float]:
    order = spec.quad_order
    centers, radii = spec.centers, spec.physical_radii

    def evaluate(n):
        return np.array([ball_average(spec.profile.deficit, c, r, n) for c, r in zip(centers, radii)])

    coarse = evaluate(order)
    while True:
        fine_order = 2 * order
        if fine_order > MAX_QUAD_ORDER:
            raise ConvergenceError(
                f"ball quadrature did not converge by order {MAX_QUAD_ORDER}", best=coarse
            )
        fine = evaluate(fine_order)
        change = np.abs(fine - coarse)
        if np.all(change <= spec.quad_rtol * np.abs(fine)):
            return fine, fine_order, float(change.max())
        coarse, order = fine, fine_order


def evaluate_ansatz(spec: AnsatzSpec) -> EnergyBreakdown:
    """Evaluate the full torus energy of the configuration term by term."""
    ev = spec.evaluator or default_evaluator()
    eta = spec.eta
    m = spec.config.masses
    r = spec.radii
    rp = spec.physical_radii
    c = spec.centers

    perimeter = float(np.sum(4.0 * np.pi * r**2))
    self_newt = float(sum(ball_self_coulomb(mi, ri) for mi, ri in zip(m, r)))
    self_reg = eta * float(sum(ball_self_regular(mi, ri, ev) for mi, ri in zip(m, rp)))

    cross_newt = 0.0
    cross_reg = 0.0
    n = len(m)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            pair = ball_pair_coulomb(m[i], rp[i], c[i], m[j], rp[j], c[j], ev)
            cross_newt += eta * pair.newtonian
            cross_reg += eta * pair.regular

    deficits, order, change = _average_deficits(spec)
    deficit_term = float(m @ deficits)
    confinement = -spec.config.total * spec.profile.rho_max + deficit_term

    parts = [perimeter, self_newt, self_reg, cross_newt, cross_reg, confinement]
    total = sum(parts)
    # perimeter + Newtonian self energy reproduce sum e0(m_i) analytically
    excess = (
        (perimeter - float(np.sum(BALL.a * m ** (2 / 3))))
        + (self_newt - float(np.sum(BALL.b * m ** (5 / 3))))
        + self_reg + cross_newt + cross_reg + deficit_term
    )
    return EnergyBreakdown(*parts, total, excess, order, change)


def predicted_energy(spec: AnsatzSpec) -> float:
    """sum e0(m_i) - M rho_max + eta^(s/(s+1)) F(p)."""
    base = float(np.sum(e0_ball(spec.config.masses))) - spec.config.total * spec.profile.rho_max
    return base + spec.eta ** interaction_exponent(spec.profile) * interaction_energy(spec.config, spec.profile)


def expansion_residual(spec: AnsatzSpec, breakdown: EnergyBreakdown | None = None) -> float:
    """Energy minus its two-scale prediction; requires delta = eta^(1/(s+1))."""
    rule = delta_rule(spec.eta, spec.profile)
    if abs(spec.delta - rule) > 1e-12 * rule:
        raise ValueError(
            f"expansion_residual needs delta = eta^(1/(s+1)) = {rule:.12g}, got {spec.delta:.12g}"
        )
    b = breakdown or evaluate_ansatz(spec)
    F = interaction_energy(spec.config, spec.profile)
    return b.excess - spec.eta ** interaction_exponent(spec.profile) * F


def breakdown_row(spec: AnsatzSpec, breakdown: EnergyBreakdown, residual: float = float("nan")) -> dict:
    """Breakdown as a mapping keyed by :data:`CSV_COLUMNS`."""
    values = (spec.eta, spec.delta, *breakdown.components(), breakdown.total, residual)
    return dict(zip(CSV_COLUMNS, values))
