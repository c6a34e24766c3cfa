"""Optimal periodic state-sampling schedules for discrete-time linear
systems, with h2 and h-infinity performance certification."""

from ._kernels import BACKEND, HAVE_COMPILED
from .model import SystemModel, scalar_model
from .schedule import Schedule
from .matops import RiccatiData, apply_operator, is_pd, solve_dare, solve_p_gamma
from .h2 import (BetaTable, CurvePoint, beta, brute_force_h2, greedy_optimize,
                 h2_curve, improve_step, j2, optimal_schedule)
from .hinf import (GammaCertificate, HinfStep, gamma_block_oracle, gamma_h,
                   gamma_schedule, hinf_curve, k_gamma, m_iteration)
from .simulate import (GIterate, SimReport, g_iteration, monte_carlo_j2,
                       phase_error_covariance, residual_lemma3)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "HAVE_COMPILED", "SystemModel", "scalar_model", "Schedule",
    "RiccatiData", "apply_operator", "is_pd", "solve_dare", "solve_p_gamma",
    "BetaTable", "CurvePoint", "beta", "brute_force_h2", "greedy_optimize",
    "h2_curve", "improve_step", "j2", "optimal_schedule",
    "GammaCertificate", "HinfStep", "gamma_block_oracle", "gamma_h",
    "gamma_schedule", "hinf_curve", "k_gamma", "m_iteration",
    "GIterate", "SimReport", "g_iteration", "monte_carlo_j2",
    "phase_error_covariance", "residual_lemma3",
]
