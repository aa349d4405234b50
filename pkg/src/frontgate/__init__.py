"""Bistable fronts in population gradients: wave speeds, barriers, propagules and PDE runs."""

__version__ = "0.1.0"

from .errors import ConfigError, InfeasibleError, NumericalError  # noqa: E402
from .reaction import (FrequencyLaw, ReactionModel, WolbachiaParams,  # noqa: E402
                       change_of_variable, constant_law, make_cubic, make_logistic,
                       make_wolbachia_f, make_wolbachia_h, potential, speed_sign_integral)
from .wavespeed import SpeedResult, bistable_speed, kpp_min_speed  # noqa: E402
from .barrier import (BarrierSolution, C_star, L_star, critical_jump,  # noqa: E402
                      enumerate_barriers, gamma, lambda_, lstar_curve, shoot)
from .propagule import Propagule, ScriptF, bubble_length, bubble_profile  # noqa: E402
from .pde import (GradientProfile, Grid1D, InitialDatum, SimulationResult,  # noqa: E402
                  classify_outcome, front_position, front_speed, simulate_frequency_law,
                  simulate_heterogeneous, simulate_two_population)
