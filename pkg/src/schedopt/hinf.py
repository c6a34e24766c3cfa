"""h-infinity attenuation bounds for periodic sampling schedules.

For evenly spaced sampling every h steps, feasibility of a level gamma is
decided by h steps of the open-loop propagation M_{k+1} = Fo(Fa(M_k))
started at the game-Riccati fixed point; gamma_h is the infimum over
feasible levels, found by bisection.  For a general schedule the bound is
that of its largest interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InfeasibleGamma, NoFeasibleGammaFound, SingularOrIndefinite, TooLarge
from .matops import apply_operator, is_pd, solve_p_gamma, sym
from .model import SystemModel
from .schedule import Schedule

DEFAULT_GAMMA_TOL = 1e-6
_BRACKET_CAP = 2.0**60
_MAX_BISECTIONS = 200


@dataclass(frozen=True)
class GammaCertificate:
    """Feasibility witness for one attenuation level and period."""

    gamma: float
    feasible: bool
    p_bar: np.ndarray | None = None
    m_iterates: list[np.ndarray] = field(default_factory=list)
    failure_index: int | None = None


def m_iteration(model: SystemModel, gamma: float, h: int) -> GammaCertificate:
    """Run the h-step open-loop propagation from the game-Riccati fixed point.

    Infeasible as soon as gamma^2*I - M_k loses positive definiteness (the
    failure index is recorded), or when the fixed point itself does not
    exist at this level.
    """
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    result = solve_p_gamma(model, gamma)
    if not result.feasible:
        return GammaCertificate(gamma=gamma, feasible=False, failure_index=0)
    g2I = gamma * gamma * np.eye(model.n)
    M = result.p_bar
    iterates = [M]
    for k in range(1, h + 1):
        if not is_pd(g2I - M):
            return GammaCertificate(gamma=gamma, feasible=False,
                                    p_bar=result.p_bar,
                                    m_iterates=iterates[:k], failure_index=k)
        if k < h:
            M = apply_operator(model, "fo", apply_operator(model, "fa", M, gamma))
            iterates.append(M)
    return GammaCertificate(gamma=gamma, feasible=True, p_bar=result.p_bar,
                            m_iterates=iterates)


def _bisect_gamma(feasible, tol: float) -> float:
    lo, hi = 1e-6, 1.0
    while not feasible(hi):
        lo = hi
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise NoFeasibleGammaFound("no feasible attenuation level up to 2^60")
    for _ in range(_MAX_BISECTIONS):
        if hi - lo <= tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def gamma_h(model: SystemModel, h: int, tol: float = DEFAULT_GAMMA_TOL) -> float:
    """Smallest attenuation bound for evenly spaced sampling every h steps."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    return _bisect_gamma(lambda g: m_iteration(model, g, h).feasible, tol)


def gamma_schedule(model: SystemModel, s: Schedule,
                   tol: float = DEFAULT_GAMMA_TOL) -> float:
    """Attenuation bound of a general schedule: that of its largest interval."""
    return gamma_h(model, s.max_interval, tol)


def gamma_block_oracle(model: SystemModel, h: int,
                       tol: float = DEFAULT_GAMMA_TOL) -> float:
    """Independent bound via the stacked h-step disturbance response.

    Feasibility of gamma is positive definiteness of
    gamma^2*I - D' diag(Q, ..., Q, P_gamma) D, where block row k of D maps
    (w_0, ..., w_{h-1}) to x_k under x_{k+1} = A x_k + w_k from x_0 = 0;
    the first h-1 states are weighted by Q and the final one by the
    game-Riccati fixed point.
    """
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    n = model.n
    if h * n > 60:
        raise TooLarge(f"block oracle capped at h*n <= 60, got {h * n}")
    a_pows = [np.linalg.matrix_power(model.A, k) for k in range(h)]
    D = np.zeros((h * n, h * n))
    for k in range(1, h + 1):
        for jcol in range(k):
            D[(k - 1) * n:k * n, jcol * n:(jcol + 1) * n] = a_pows[k - 1 - jcol]

    def feasible(g: float) -> bool:
        result = solve_p_gamma(model, g)
        if not result.feasible:
            return False
        weights = np.zeros((h * n, h * n))
        for k in range(1, h):
            weights[(k - 1) * n:k * n, (k - 1) * n:k * n] = model.Q
        weights[(h - 1) * n:, (h - 1) * n:] = result.p_bar
        return is_pd(g * g * np.eye(h * n) - sym(D.T @ weights @ D))

    return _bisect_gamma(feasible, tol)


def k_gamma(model: SystemModel, gamma: float) -> np.ndarray:
    """State-feedback gain achieving the level gamma under per-step sampling."""
    result = solve_p_gamma(model, gamma)
    if not result.feasible:
        raise InfeasibleGamma(f"gamma={gamma} is below the achievable bound")
    try:
        F = apply_operator(model, "fa", result.p_bar, gamma)
    except SingularOrIndefinite as exc:
        raise InfeasibleGamma(f"gamma={gamma} is below the achievable bound") from exc
    S = model.R + model.B.T @ F @ model.B
    return -np.linalg.solve(S, model.B.T @ F @ model.A)


@dataclass(frozen=True)
class HinfStep:
    """One step of the bound-versus-average-interval staircase.

    Average intervals in (lower, upper] all admit the same optimal bound;
    the first step (h=1) degenerates to the single point 1.
    """

    lower: Fraction
    upper: Fraction
    gamma: float


def hinf_curve(model: SystemModel, h_max: int,
               tol: float = DEFAULT_GAMMA_TOL) -> list[HinfStep]:
    """Optimal bound as a piecewise-constant function of the average interval."""
    if h_max < 1:
        raise ValueError(f"h_max must be >= 1, got {h_max}")
    return [HinfStep(lower=Fraction(h - 1), upper=Fraction(h),
                     gamma=gamma_h(model, h, tol))
            for h in range(1, h_max + 1)]
