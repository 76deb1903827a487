"""Sweeps over the droplet scale eta and log-log exponent fits."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .ansatz import (
    AnsatzSpec,
    delta_rule,
    evaluate_ansatz,
    expansion_residual,
    interaction_exponent,
)
from .interaction import DropletConfig, minimize_interaction
from .liquid_drop import ball_radius
from .profiles import ConfinementProfile

log = logging.getLogger(__name__)

MODES = ("fixed_delta_rule", "optimize_delta")
ETA_FLOOR = 1e-6

SWEEP_COLUMNS = ("eta", "delta_star", "delta_ratio", "F_value", "energy_excess", "total", "residual")

# golden-section bracket on log(delta): [eta^0.5, eta^0.15]
DELTA_BRACKET_EXPONENTS = (0.5, 0.15)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepPlan:
    eta_values: tuple[float, ...]
    mode: str
    profile: ConfinementProfile
    masses: tuple[float, ...]
    restarts: int = 32
    seed: int = 0
    quad_order: int = 16

    def __post_init__(self):
        etas = tuple(float(e) for e in self.eta_values)
        if not etas:
            raise ValueError("eta_values must not be empty")
        if any(b >= a for a, b in zip(etas, etas[1:])):
            raise ValueError("eta_values must be strictly decreasing")
        if etas[-1] < ETA_FLOOR or etas[0] >= 1:
            raise ValueError(f"eta_values must lie in [{ETA_FLOOR}, 1)")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        masses = tuple(float(m) for m in self.masses)
        if not masses or any(m <= 0 for m in masses):
            raise ValueError("masses must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        object.__setattr__(self, "eta_values", etas)
        object.__setattr__(self, "masses", masses)


@dataclass
class SweepResult:
    plan: SweepPlan
    rows: list[dict] = field(default_factory=list)
    skipped: list[tuple[float, str]] = field(default_factory=list)
    positions: np.ndarray | None = None

    def column(self, name: str) -> np.ndarray:
        """Column values; ``abs_<name>`` gives absolute values."""
        if name.startswith("abs_"):
            return np.abs(self.column(name[4:]))
        if name not in SWEEP_COLUMNS:
            raise KeyError(name)
        return np.array([row[name] for row in self.rows], dtype=float)

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class FitResult:
    """Least-squares line through (log x, log y)."""

    exponent: float
    intercept: float
    residuals: np.ndarray
    r_squared: float
    stderr: float
    ci95: tuple[float, float]
    n_points: int
    dropped_largest: bool = False

    @property
    def prefactor(self) -> float:
        return math.exp(self.intercept)


def _table_column(table, name):
    if isinstance(table, SweepResult):
        return table.column(name)
    if isinstance(table, Mapping):
        return np.asarray(table[name], dtype=float)
    raise TypeError("table must be a SweepResult or a mapping of columns")


def _linefit(lx, ly) -> FitResult:
    res = stats.linregress(lx, ly)
    resid = ly - (res.intercept + res.slope * lx)
    n = len(lx)
    r2 = min(1.0, max(0.0, float(res.rvalue) ** 2))
    if n > 2 and np.isfinite(res.stderr):
        half = float(stats.t.ppf(0.975, n - 2) * res.stderr)
    else:
        half = float("nan")
    return FitResult(
        exponent=float(res.slope),
        intercept=float(res.intercept),
        residuals=resid,
        r_squared=r2,
        stderr=float(res.stderr),
        ci95=(float(res.slope) - half, float(res.slope) + half),
        n_points=n,
    )


def fit_exponent(table, x_column: str, y_column: str, drop_pre_asymptotic: bool = True) -> FitResult:
    """Fit y ~ C x^k on log-log axes and return k as ``exponent``.

    When ``drop_pre_asymptotic`` is set and r^2 < 0.999 with at least four
    points, the point with the largest x is dropped once and the fit
    repeated; ``dropped_largest`` records this.
    """
    x = _table_column(table, x_column)
    y = _table_column(table, y_column)
    if len(x) != len(y):
        raise ValueError("columns differ in length")
    if len(x) < 3:
        raise ValueError(f"need at least 3 points to fit, got {len(x)}")
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise ValueError("log-log fit needs strictly positive data")
    lx, ly = np.log(x), np.log(y)
    fit = _linefit(lx, ly)
    if drop_pre_asymptotic and fit.r_squared < 0.999 and len(x) >= 4:
        keep = np.arange(len(x)) != int(np.argmax(x))
        fit = _linefit(lx[keep], ly[keep])
        fit = FitResult(**{**fit.__dict__, "dropped_largest": True})
    return fit


def golden_section(func, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200) -> float:
    """Minimiser of a unimodal ``func`` on [lo, hi] by golden-section search."""
    if not lo < hi:
        raise ValueError("empty bracket")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = func(d)
    return c if fc <= fd else d


def admissible_delta_range(eta: float, config: DropletConfig) -> tuple[float, float]:
    """Open interval of delta for which the droplet configuration is valid."""
    r = eta * np.asarray(ball_radius(config.masses))
    norms = np.linalg.norm(config.positions, axis=1)
    with np.errstate(divide="ignore"):
        upper = np.where(norms > 0, (0.25 - r) / norms, np.inf)
    hi = float(upper.min())
    lo = 4.0 * float(r.max()) / config.min_pair_distance() if config.n > 1 else 0.0
    return lo, hi


def optimal_delta(eta: float, config: DropletConfig, profile: ConfinementProfile, quad_order: int = 16) -> float:
    """delta minimising the full ansatz energy, by golden section on log(delta).

    The search starts on [eta^0.5, eta^0.15] and widens by a decade on
    whichever side the minimiser lands, up to the admissible range.
    """
    lo_v, hi_v = admissible_delta_range(eta, config)
    lo_v, hi_v = math.log(lo_v * (1 + 1e-9)) if lo_v > 0 else -math.inf, math.log(hi_v * (1 - 1e-9))
    lo, hi = (math.log(eta) * e for e in DELTA_BRACKET_EXPONENTS)
    lo, hi = max(lo, lo_v), min(hi, hi_v)
    if not lo < hi:
        raise ValueError(f"no admissible delta near eta^(1/3) at eta={eta:g}")

    def energy(log_delta):
        spec = AnsatzSpec(eta, math.exp(log_delta), config, profile, quad_order=quad_order)
        return evaluate_ansatz(spec).excess

    for _ in range(20):
        best = golden_section(energy, lo, hi)
        edge = 1e-6 * (hi - lo)
        if best - lo < edge and lo > lo_v:
            lo = max(lo - math.log(10.0), lo_v)
        elif hi - best < edge and hi < hi_v:
            hi = min(hi + math.log(10.0), hi_v)
        else:
            break
    else:
        log.warning("optimal_delta: minimiser still on the bracket edge at eta=%g", eta)
    return math.exp(best)


def run_sweep(plan: SweepPlan) -> SweepResult:
    """Evaluate the droplet energy along ``plan.eta_values``.

    Positions minimise the interaction energy (each eta warm-starts from the
    previous optimum).  The separation is eta^(1/(s+1)) or, in
    ``optimize_delta`` mode, the minimiser of the full energy.  Points that
    violate the configuration checks are skipped and listed in ``skipped``.
    """
    result = SweepResult(plan)
    profile = plan.profile
    s_exp = interaction_exponent(profile)
    positions = None
    for eta in plan.eta_values:
        if positions is None:
            opt = minimize_interaction(plan.masses, profile, plan.restarts, plan.seed)
        else:
            opt = minimize_interaction(plan.masses, profile, initial_positions=[positions])
        positions = opt.config.positions
        config = opt.config
        rule = delta_rule(eta, profile)
        try:
            if plan.mode == "optimize_delta":
                delta = optimal_delta(eta, config, profile, plan.quad_order)
            else:
                delta = rule
            spec = AnsatzSpec(eta, delta, config, profile, quad_order=plan.quad_order)
            b = evaluate_ansatz(spec)
        except ValueError as err:
            log.warning("skipping eta=%g: %s", eta, err)
            result.skipped.append((eta, str(err)))
            continue
        residual = expansion_residual(spec, b) if plan.mode == "fixed_delta_rule" else b.excess - eta**s_exp * opt.energy
        result.rows.append({
            "eta": eta,
            "delta_star": delta,
            "delta_ratio": delta / rule,
            "F_value": opt.energy,
            "energy_excess": b.excess,
            "total": b.total,
            "residual": residual,
        })
    result.positions = positions
    return result


def summarize(result: SweepResult) -> dict[str, FitResult]:
    """Exponent fits of |energy_excess| and delta_star against eta.

    Empty when fewer than three points survived.
    """
    if len(result) < 3:
        return {}
    return {
        "energy_excess": fit_exponent(result, "eta", "abs_energy_excess"),
        "delta_star": fit_exponent(result, "eta", "delta_star"),
    }
