import math

import numpy as np
import pytest

from dropletlab.ansatz import (
    CSV_COLUMNS,
    AnsatzSpec,
    breakdown_row,
    delta_rule,
    evaluate_ansatz,
    expansion_residual,
    interaction_exponent,
    predicted_energy,
    two_term_optimal_delta,
)
from dropletlab.errors import OverlapError
from dropletlab.green import default_evaluator
from dropletlab.interaction import DropletConfig, energy_components, minimize_interaction
from dropletlab.liquid_drop import e0_ball
from dropletlab.profiles import ConfinementProfile
from oracles import uniform_ball

PROFILE = ConfinementProfile.isotropic(10.0)
PAIR = DropletConfig([0.01, 0.01], [[0.1, 0, 0], [-0.1, 0, 0]])


def spec(eta=1e-3, delta=None, config=PAIR, profile=PROFILE):
    return AnsatzSpec(eta, delta if delta is not None else delta_rule(eta, profile), config, profile)


def test_rules():
    assert delta_rule(1e-3, PROFILE) == pytest.approx(0.1)
    assert delta_rule(1e-5, ConfinementProfile.power_law(1.0, 4.0)) == pytest.approx(0.1)
    assert interaction_exponent(PROFILE) == pytest.approx(2 / 3)


def test_components_against_closed_forms():
    s = spec()
    b = evaluate_ansatz(s)
    m = PAIR.masses
    r = (3 * m / (4 * math.pi)) ** (1 / 3)
    eta = s.eta
    assert b.perimeter_term == pytest.approx(np.sum(4 * math.pi * r**2), rel=1e-14)
    assert b.nonlocal_self_newtonian == pytest.approx(np.sum(3 * m**2 / (10 * math.pi * r)), rel=1e-14)
    g0 = default_evaluator().g0
    assert b.nonlocal_self_regular == pytest.approx(eta * np.sum(m**2 * (g0 + (eta * r) ** 2 / 5)), rel=1e-12)
    d = 2 * 0.1 * s.delta
    assert b.nonlocal_cross_newtonian == pytest.approx(2 * eta * m[0] * m[1] / (4 * math.pi * d), rel=1e-12)
    assert b.total == sum(b.components())


def test_excess_consistent_with_total():
    s = spec()
    b = evaluate_ansatz(s)
    base = float(np.sum(e0_ball(PAIR.masses))) - PAIR.total * PROFILE.rho_max
    assert b.excess == pytest.approx(b.total - base, abs=1e-12 * abs(base))


def test_confinement_by_monte_carlo():
    s = spec(eta=1e-2, delta=0.3)
    b = evaluate_ansatz(s)
    rng = np.random.default_rng(2)
    n = 200_000
    total = 0.0
    for m, c, r in zip(PAIR.masses, s.centers, s.physical_radii):
        vals = PROFILE.deficit(c + r * uniform_ball(rng, n))
        total += m * vals.mean()
    expected = -PAIR.total * PROFILE.rho_max + total
    assert b.confinement_term == pytest.approx(expected, rel=1e-6)


def test_quadratic_confinement_exact():
    # local density: ball average of q is q(c) + (3/5) r^2 tr(H)/3
    prof = ConfinementProfile.isotropic(10.0, density_mode="local")
    s = spec(profile=prof)
    b = evaluate_ansatz(s)
    q = prof.q(s.centers) + 0.6 * s.physical_radii**2 * 10.0
    assert b.confinement_term == pytest.approx(-PAIR.total * prof.rho_max + PAIR.masses @ q, rel=1e-13)


def test_prediction_error_shrinks():
    cfg = minimize_interaction([0.01, 0.01], PROFILE, restarts=4).config
    ratios = []
    for eta in (1e-3, 1e-4, 1e-5):
        s = spec(eta, config=cfg)
        ratios.append(abs(expansion_residual(s)) / eta ** (2 / 3))
        assert abs(evaluate_ansatz(s).total - predicted_energy(s)) < 1e-3 * abs(predicted_energy(s))
    assert ratios[0] > ratios[1] > ratios[2]


def test_residual_requires_rule_delta():
    with pytest.raises(ValueError, match="delta"):
        expansion_residual(spec(delta=0.05))


def test_two_term_delta_scales_like_rule():
    ratios = [two_term_optimal_delta(e, PAIR, PROFILE) / delta_rule(e, PROFILE) for e in (1e-2, 1e-4)]
    assert ratios[0] == pytest.approx(ratios[1], rel=1e-12)
    R, Q = energy_components(PAIR, PROFILE)
    assert ratios[0] == pytest.approx((R / (2 * Q)) ** (1 / 3))


def test_validation():
    with pytest.raises(ValueError, match="eta"):
        spec(eta=1.5, delta=0.1)
    with pytest.raises(ValueError, match="leave"):
        spec(delta=3.0)
    with pytest.raises(ValueError):
        spec(eta=0.1, delta=0.02)
    big = DropletConfig([1.0, 1.0], [[0.01, 0, 0], [-0.01, 0, 0]])
    with pytest.raises(OverlapError):
        AnsatzSpec(0.05, 1.0, big, PROFILE)


def test_breakdown_row():
    s = spec()
    row = breakdown_row(s, evaluate_ansatz(s), 0.5)
    assert tuple(row) == CSV_COLUMNS
    assert row["residual"] == 0.5


def test_quadrature_converges():
    b = evaluate_ansatz(spec(eta=1e-2, delta=0.2))
    assert b.quadrature_change <= 1e-12 * abs(b.confinement_term) + 1e-15
