"""Droplet interaction energy: Coulomb repulsion plus confinement on R^3.

    F(x_1..x_n) = sum_{i != j} m_i m_j / (4 pi |x_i - x_j|) + sum_i m_i q(x_i)

The repulsion sums over *ordered* pairs, so every unordered pair appears
twice.  For two masses m at +-d on an axis and q = |x|^2 this gives
F = m^2 / (4 pi d) + 2 m d^2.

At a critical point the dilation x -> lambda x is stationary, which gives the
virial identity R = s Q between the repulsion R and the confinement Q, where
s is the homogeneity degree of q.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, SingularConfigurationError
from .liquid_drop import DEFAULT_ADMISSIBLE_CAP, MassPartition, optimal_partition
from .profiles import ConfinementProfile

log = logging.getLogger(__name__)

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class DropletConfig:
    """Masses and rescaled centers of ``n`` droplets (immutable arrays)."""

    masses: np.ndarray
    positions: np.ndarray
    total: float | None = None

    def __post_init__(self):
        m = np.array(self.masses, dtype=float).reshape(-1)
        x = np.array(self.positions, dtype=float).reshape(-1, 3)
        if len(m) == 0 or len(m) != len(x):
            raise ValueError(f"got {len(m)} masses and {len(x)} positions")
        if np.any(~np.isfinite(m)) or np.any(m <= 0):
            raise ValueError("droplet masses must be positive")
        if np.any(~np.isfinite(x)):
            raise ValueError("droplet positions must be finite")
        if len(m) > 1 and _min_pair_distance(x) == 0.0:
            raise SingularConfigurationError("droplet positions must be pairwise distinct")
        M = float(np.sum(m))
        if self.total is not None and abs(self.total - M) > 1e-12 * max(1.0, M):
            raise ValueError(f"total {self.total} does not match sum of masses {M}")
        m.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "total", M)

    @property
    def n(self) -> int:
        return len(self.masses)

    def min_pair_distance(self) -> float:
        return _min_pair_distance(self.positions) if self.n > 1 else np.inf

    def with_positions(self, positions) -> DropletConfig:
        return DropletConfig(self.masses, positions)


def _min_pair_distance(x) -> float:
    d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)
    return float(d[np.triu_indices(len(x), 1)].min())


def _pair_terms(x):
    diff = x[:, None, :] - x[None, :, :]
    r = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(r, np.inf)
    if np.any(r == 0.0):
        raise SingularConfigurationError("coincident droplet positions")
    return diff, r


def energy_components(config: DropletConfig, profile: ConfinementProfile) -> tuple[float, float]:
    """Return (repulsion R, confinement Q) with F = R + Q."""
    m, x = config.masses, config.positions
    _, r = _pair_terms(x)
    repulsion = float(np.sum(np.outer(m, m) / (FOUR_PI * r)))
    confinement = float(m @ profile.q(x))
    return repulsion, confinement


def interaction_energy(config: DropletConfig, profile: ConfinementProfile) -> float:
    R, Q = energy_components(config, profile)
    return R + Q


def interaction_gradient(config: DropletConfig, profile: ConfinementProfile) -> np.ndarray:
    """Gradient of F with respect to each droplet position, shape (n, 3)."""
    return _gradient(config.masses, config.positions, profile)


def _energy(m, x, profile):
    _, r = _pair_terms(x)
    return float(np.sum(np.outer(m, m) / (FOUR_PI * r)) + m @ profile.q(x))


def _gradient(m, x, profile):
    diff, r = _pair_terms(x)
    coef = np.outer(m, m) / (FOUR_PI * r**3)
    # factor 2: each unordered pair appears twice in F
    repulsive = -2.0 * np.einsum("ij,ijk->ik", coef, diff)
    return m[:, None] * profile.grad_q(x) + repulsive


def virial_check(config: DropletConfig, profile: ConfinementProfile) -> tuple[float, float, float]:
    """Return (R, Q, |R - s Q| / (R + Q)); the residual vanishes at critical points.

    A single droplet has R = 0, so the relative form is meaningless; the
    absolute value s Q is returned instead.
    """
    R, Q = energy_components(config, profile)
    s = profile.homogeneity
    if config.n == 1:
        return R, Q, s * Q
    if R + Q == 0.0:
        return R, Q, 0.0
    return R, Q, abs(R - s * Q) / (R + Q)


def dilation_optimal_scale(config: DropletConfig, profile: ConfinementProfile) -> float:
    """lambda* minimising F(lambda x) over lambda > 0, (R / (s Q))^(1/(s+1))."""
    R, Q = energy_components(config, profile)
    if R == 0.0 or Q == 0.0:
        raise ValueError("dilation optimum needs both repulsion and confinement")
    s = profile.homogeneity
    return (R / (s * Q)) ** (1.0 / (s + 1.0))


@dataclass(frozen=True)
class InteractionMinimum:
    """Outcome of :func:`minimize_interaction`.

    ``local_minima`` lists one representative per energy cluster (restarts
    whose energies agree to 1e-6 relative), sorted by energy.
    """

    config: DropletConfig
    energy: float
    gradient_norm: float
    converged: bool
    restart_index: int
    restart_energies: tuple[float, ...]
    local_minima: tuple[tuple[float, DropletConfig], ...] = field(repr=False)


def _descend(m, x, profile, tol, max_iter):
    """Gradient descent with Armijo backtracking and capped displacements.

    The trial step is the Barzilai-Borwein length; it is then halved until
    sufficient decrease holds and no droplet moves farther than a tenth of
    the current minimal pair distance.
    """
    f = _energy(m, x, profile)
    g = _gradient(m, x, profile)
    step = 1e-2
    x_prev = g_prev = None
    for it in range(max_iter):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= tol * (1.0 + abs(f)):
            return x, f, gnorm, True, it
        if x_prev is not None:
            sx, sg = (x - x_prev).ravel(), (g - g_prev).ravel()
            curv = float(sx @ sg)
            if curv > 0:
                step = float(sx @ sx) / curv
        if len(m) > 1:
            cap = 0.1 * _min_pair_distance(x)
        else:
            cap = 0.1 * max(float(np.linalg.norm(x)), 1e-3)
        moves = np.linalg.norm(g, axis=1).max()
        t = min(step, cap / moves) if moves > 0 else step
        slope = gnorm * gnorm
        while True:
            x_new = x - t * g
            try:
                f_new = _energy(m, x_new, profile)
            except SingularConfigurationError:
                f_new = np.inf
            if f_new <= f - 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-300:
                return x, f, gnorm, False, it
        x_prev, g_prev = x, g
        x, f = x_new, f_new
        g = _gradient(m, x, profile)
    gnorm = float(np.linalg.norm(g))
    return x, f, gnorm, gnorm <= tol * (1.0 + abs(f)), max_iter


def initial_configurations(masses, profile: ConfinementProfile, restarts: int, seed: int) -> list[np.ndarray]:
    """Random Gaussian starts, each dilated onto its virial-optimal scale."""
    m = np.asarray(masses, dtype=float)
    rng = np.random.default_rng(seed)
    starts = []
    for _ in range(restarts):
        x = rng.standard_normal((len(m), 3))
        if len(m) > 1:
            x *= dilation_optimal_scale(DropletConfig(m, x), profile)
        starts.append(x)
    return starts


def minimize_interaction(
    masses,
    profile: ConfinementProfile,
    restarts: int = 32,
    seed: int = 0,
    tol: float = 1e-8,
    max_iter: int = 20000,
    initial_positions=None,
) -> InteractionMinimum:
    """Multi-start local minimisation of F over droplet positions.

    Restarts run in order; the reported optimum is the lowest energy with
    ties going to the lowest restart index, so results depend only on
    ``seed``.  ``initial_positions`` (a list of (n, 3) arrays) replaces the
    random starts.

    Raises
    ------
    ConvergenceError
        If the best restart has not met the gradient tolerance after
        ``max_iter`` iterations; ``err.best`` holds that iterate.
    """
    m = np.asarray(masses, dtype=float).reshape(-1)
    if len(m) == 0 or np.any(m <= 0):
        raise ValueError("masses must be positive")
    if initial_positions is None:
        if restarts < 1:
            raise ValueError("restarts must be at least 1")
        starts = initial_configurations(m, profile, restarts, seed)
    else:
        starts = [np.array(p, dtype=float).reshape(len(m), 3) for p in initial_positions]

    results = []
    for x0 in starts:
        x, f, gnorm, ok, iters = _descend(m, x0, profile, tol, max_iter)
        log.debug("restart finished: F=%.12g |grad|=%.2e iters=%d", f, gnorm, iters)
        results.append((f, x, gnorm, ok))

    energies = [r[0] for r in results]
    best = int(np.argmin(energies))  # first index among ties
    f, x, gnorm, ok = results[best]
    config = DropletConfig(m, x)

    minima = []
    for i in np.argsort(energies, kind="stable"):
        fi = energies[i]
        if not minima or abs(fi - minima[-1][0]) > 1e-6 * max(1.0, abs(fi)):
            minima.append((fi, DropletConfig(m, results[i][1])))

    out = InteractionMinimum(config, f, gnorm, ok, best, tuple(energies), tuple(minima))
    if not ok:
        raise ConvergenceError(
            f"interaction minimisation stalled at |grad|={gnorm:.3e} (F={f:.12g})", best=out
        )
    return out


def minimize_masses_and_positions(
    M: float,
    profile: ConfinementProfile,
    n_max: int = 8,
    admissible_cap: float = DEFAULT_ADMISSIBLE_CAP,
    restarts: int = 32,
    seed: int = 0,
) -> tuple[MassPartition, InteractionMinimum]:
    """Experimental: choose droplet masses, then place them.

    Masses come from the ball-energy partition, which does not see the
    positions, so one pass of the alternation is already a fixed point.
    Whether this jointly minimises F is not known.
    """
    partition = optimal_partition(M, n_max, admissible_cap)
    return partition, minimize_interaction(partition.masses, profile, restarts, seed)
