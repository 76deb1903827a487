"""Worked examples and invariants with known answers, across modules."""

import math

import numpy as np
import pytest

from dropletlab.ansatz import AnsatzSpec, evaluate_ansatz
from dropletlab.green import ball_pair_coulomb, ball_self_coulomb, default_evaluator
from dropletlab.interaction import (
    DropletConfig,
    interaction_energy,
    interaction_gradient,
    minimize_interaction,
    virial_check,
)
from dropletlab.liquid_drop import (
    BALL,
    ball_perimeter,
    ball_radius,
    e0_ball,
    e0_ball_second_derivative,
    optimal_partition,
)
from dropletlab.profiles import ConfinementProfile
from dropletlab.scaling import SweepPlan, run_sweep
from oracles import fourier_green, random_rotation

EV = default_evaluator()
ISO = ConfinementProfile.isotropic(1.0)


def test_green_at_farthest_point():
    x = np.array([0.5, 0.5, 0.5])
    assert EV.green(x) == pytest.approx(fourier_green(x)[0], abs=1e-9)
    assert EV.green(x) == pytest.approx(EV.green(-x), abs=1e-15)


def test_green_near_origin():
    x = np.array([1e-3, 0.0, 0.0])
    approx = 1 / (4 * math.pi * 1e-3) + EV.g0
    assert abs(EV.green(x) - approx) / EV.green(x) < 1e-4


def test_newtonian_dominance_is_linear():
    d = np.logspace(-5, -2, 10)
    x = np.outer(d, [0.6, 0.0, 0.8])
    excess = np.abs(EV.green(x) - 1 / (4 * math.pi * d) - EV.g0)
    assert np.max(excess / d) < 1e-2


def test_unit_masses_at_quarter_distance():
    pair = ball_pair_coulomb(1.0, 0.01, np.zeros(3), 1.0, 0.01, np.array([0.25, 0, 0]))
    assert pair.newtonian == pytest.approx(1 / math.pi, rel=1e-15)


@pytest.mark.parametrize("m", [0.5, 1.0, 5.0])
def test_e0_is_perimeter_plus_self_energy(m):
    r = ball_radius(m)
    assert e0_ball(m) == pytest.approx(ball_perimeter(m) + ball_self_coulomb(m, r), abs=1e-10)


def test_e0_small_mass_limit():
    assert e0_ball(1e-12) / 1e-8 == pytest.approx(BALL.a, rel=1e-6)


def test_second_derivative_signs():
    assert e0_ball_second_derivative(1.0) < 0 < e0_ball_second_derivative(10.0)


def test_small_mass_stays_whole():
    assert optimal_partition(1.0, 4, admissible_cap=10.0).masses == (1.0,)


def test_strict_subadditivity_below_two_pi():
    rng = np.random.default_rng(4)
    M = rng.uniform(0.01, 2 * math.pi, 500)
    m = M * rng.uniform(1e-3, 1 - 1e-3, 500)
    assert np.all(e0_ball(M) < e0_ball(m) + e0_ball(M - m))


@pytest.mark.parametrize("M,cap", [(30.0, 100.0), (45.0, 12.0), (9.0, 7.0)])
def test_partition_resolution_invariant(M, cap):
    a = optimal_partition(M, 6, cap, resolution=256)
    b = optimal_partition(M, 6, cap, resolution=512)
    assert a.masses == pytest.approx(b.masses, rel=1e-10)


def test_partition_permutation_invariant_objective():
    p = optimal_partition(40.0, 6, 15.0)
    assert np.sum(e0_ball(np.array(p.masses[::-1]))) == pytest.approx(p.objective, rel=1e-15)


def test_interaction_examples():
    assert interaction_energy(DropletConfig([1.0], [[0, 0, 0]]), ISO) == 0.0
    d = 0.2
    two = DropletConfig([1.0, 1.0], [[d, 0, 0], [-d, 0, 0]])
    assert interaction_energy(two, ISO) == pytest.approx(2 * d * d + 1 / (4 * math.pi * d), rel=1e-15)
    assert np.all(interaction_gradient(DropletConfig([2.0], [[0, 0, 0]]), ISO) == 0)


def test_interaction_against_naive_sum():
    rng = np.random.default_rng(8)
    m, x = rng.uniform(0.5, 2, 3), rng.standard_normal((3, 3))
    H = np.diag([1.0, 2.0, 3.0])
    naive = sum(m[i] * m[j] / (4 * math.pi * np.linalg.norm(x[i] - x[j]))
                for i in range(3) for j in range(3) if i != j)
    naive += sum(m[i] * x[i] @ H @ x[i] for i in range(3))
    prof = ConfinementProfile.quadratic(H)
    assert interaction_energy(DropletConfig(m, x), prof) == pytest.approx(naive, rel=1e-12)


def test_two_droplet_optimum_is_critical():
    m = 3.0
    d = (m / (16 * math.pi)) ** (1 / 3)
    c = DropletConfig([m, m], [[d, 0, 0], [-d, 0, 0]])
    assert np.linalg.norm(interaction_gradient(c, ISO)) < 1e-8
    R, Q, res = virial_check(c, ISO)
    assert res < 1e-14 and R == pytest.approx(2 * Q, rel=1e-14)


def test_single_mass_optimum():
    opt = minimize_interaction([1.5], ISO, restarts=3)
    assert opt.energy == pytest.approx(0.0, abs=1e-14)
    assert virial_check(opt.config, ISO)[2] < 1e-14


def test_rotated_starts_give_same_energy():
    rng = np.random.default_rng(1)
    starts = [rng.standard_normal((4, 3)) * 0.5 for _ in range(4)]
    Q = random_rotation(rng)
    a = minimize_interaction([1.0, 2.0, 1.0, 0.5], ISO, initial_positions=starts)
    b = minimize_interaction([1.0, 2.0, 1.0, 0.5], ISO, initial_positions=[s @ Q.T for s in starts])
    assert a.energy == pytest.approx(b.energy, abs=1e-8)


def test_quartic_virial_at_minimum():
    prof = ConfinementProfile.power_law(1.0, 4.0)
    opt = minimize_interaction([1.0, 0.5, 2.0], prof, restarts=4, seed=2)
    assert virial_check(opt.config, prof)[2] < 1e-6


def test_minimisers_keep_droplets_apart():
    rng = np.random.default_rng(0)
    for seed in range(5):
        opt = minimize_interaction(rng.uniform(0.1, 10, 5), ISO, restarts=3, seed=seed)
        assert opt.config.min_pair_distance() > 1e-6


def test_perimeter_of_two_balls():
    cfg = DropletConfig([1.0, 2.0], [[1, 0, 0], [-1, 0, 0]])
    b = evaluate_ansatz(AnsatzSpec(1e-3, 0.1, cfg, ISO))
    expected = 4 * math.pi * ((3 / (4 * math.pi)) ** (2 / 3) + (6 / (4 * math.pi)) ** (2 / 3))
    assert b.perimeter_term == pytest.approx(expected, rel=1e-15)


def test_cross_newtonian_of_unit_pair():
    cfg = DropletConfig([1.0, 1.0], [[1, 0, 0], [-1, 0, 0]])
    b = evaluate_ansatz(AnsatzSpec(1e-3, 0.1, cfg, ISO))
    assert b.nonlocal_cross_newtonian == pytest.approx(1e-3 * 2 / (4 * math.pi * 0.2), rel=1e-15)


def test_single_droplet_regular_self_energy():
    M, eta = 1.0, 1e-3
    b = evaluate_ansatz(AnsatzSpec(eta, 0.1, DropletConfig([M], [[0, 0, 0]]), ISO))
    assert b.nonlocal_self_regular == pytest.approx(eta * EV.g0 * M * M, abs=1e-9)


def test_separation_ratio_settles():
    plan = SweepPlan((1e-2, 1e-3, 1e-4, 1e-5), "optimize_delta", ConfinementProfile.isotropic(10.0),
                     (0.01, 0.01), restarts=4)
    ratio = run_sweep(plan).column("delta_star") / np.array(plan.eta_values) ** (1 / 3)
    last = ratio[-2:]
    assert abs(last[0] - last[1]) / last[1] < 0.02
