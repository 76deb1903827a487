"""Numerical laboratory for confined droplets of a nonlocal isoperimetric energy.

Modules
-------
torus        point arithmetic on the flat unit 3-torus
green        periodic Green's function (Ewald), regular part, ball Coulomb energies
liquid_drop  ball liquid-drop energy e0 and optimal mass partitions
profiles     confinement densities and their local models
interaction  droplet interaction energy F and its minimisation
ansatz       full energy of the spherical-droplet configuration
scaling      eta sweeps and log-log exponent fits
config, cli  experiment configs and the ``dropletlab`` command
"""

from .ansatz import AnsatzSpec, EnergyBreakdown, delta_rule, evaluate_ansatz, expansion_residual
from .errors import ConvergenceError, OverlapError, SingularConfigurationError
from .green import GreenEvaluator, ball_pair_coulomb, ball_self_coulomb
from .interaction import (
    DropletConfig,
    interaction_energy,
    interaction_gradient,
    minimize_interaction,
    virial_check,
)
from .liquid_drop import BALL, MassPartition, e0_ball, e0_ball_second_derivative, optimal_partition
from .profiles import ConfinementProfile
from .scaling import FitResult, SweepPlan, fit_exponent, run_sweep
from .torus import TorusPoint, torus_distance, wrap

__all__ = [
    "AnsatzSpec", "BALL", "ConfinementProfile", "ConvergenceError", "DropletConfig",
    "EnergyBreakdown", "FitResult", "GreenEvaluator", "MassPartition", "OverlapError",
    "SingularConfigurationError", "SweepPlan", "TorusPoint", "ball_pair_coulomb",
    "ball_self_coulomb", "delta_rule", "e0_ball", "e0_ball_second_derivative",
    "evaluate_ansatz", "expansion_residual", "fit_exponent", "interaction_energy",
    "interaction_gradient", "minimize_interaction", "optimal_partition", "run_sweep",
    "torus_distance", "virial_check", "wrap",
]
