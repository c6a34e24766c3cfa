"""Dense symmetric-matrix kernel layer.

Positive-definiteness tests, the LQ Riccati solver, the three game-Riccati
operators (disturbance maximization, controlled step, open-loop step), and
the fixed point of their controlled composition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import _kernels
from .errors import NonConvergence, NotSymmetric, SingularOrIndefinite
from .model import SystemModel

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000

OperatorKind = Literal["fa", "fc", "fo"]


def sym(M: np.ndarray) -> np.ndarray:
    """Symmetrize, damping roundoff drift before each operator application."""
    return 0.5 * (M + M.T)


def is_pd(M: np.ndarray, tol: float | None = None) -> bool:
    """Cholesky test of M - tol*I; tol defaults to 1e-9 * (1 + max|M|)."""
    M = np.asarray(M, dtype=float)
    scale = 1.0 + (np.max(np.abs(M)) if M.size else 0.0)
    if np.max(np.abs(M - M.T)) > 1e-8 * scale:
        raise NotSymmetric("is_pd requires a symmetric matrix")
    if tol is None:
        tol = 1e-9 * scale
    try:
        np.linalg.cholesky(sym(M) - tol * np.eye(M.shape[0]))
    except np.linalg.LinAlgError:
        return False
    return True


@dataclass(frozen=True)
class RiccatiData:
    """LQ Riccati solution P with the derived gain K and error weight Z."""

    P: np.ndarray
    K: np.ndarray
    Z: np.ndarray
    tr_pw: float


def _riccati_step(model: SystemModel, P: np.ndarray) -> np.ndarray:
    S = model.R + model.B.T @ P @ model.B
    APB = model.A.T @ P @ model.B
    return sym(model.A.T @ P @ model.A + model.Q - APB @ np.linalg.solve(S, APB.T))


def solve_dare(model: SystemModel, tol: float = DEFAULT_TOL,
               max_iter: int = DEFAULT_MAX_ITER) -> RiccatiData:
    """Fixed-point iteration for the discrete algebraic Riccati equation.

    Starts at P0 = Q (bumped by 1e-9*I when Q is singular) and iterates the
    Riccati map until the max-absolute-entry update falls below tol.
    """
    P = np.array(model.Q)
    if not is_pd(P, tol=0.0):
        P = P + 1e-9 * np.eye(model.n)
    for _ in range(max_iter):
        P_next = _riccati_step(model, P)
        if np.max(np.abs(P_next - P)) < tol:
            P = P_next
            break
        P = P_next
    else:
        raise NonConvergence(
            f"Riccati iteration did not converge within {max_iter} iterations")
    S = model.R + model.B.T @ P @ model.B
    K = -np.linalg.solve(S, model.B.T @ P @ model.A)
    Z = sym(model.A.T @ P @ model.B @ np.linalg.solve(S, model.B.T @ P @ model.A))
    return RiccatiData(P=P, K=K, Z=Z, tr_pw=float(np.trace(P @ model.W)))


def apply_operator(model: SystemModel, kind: OperatorKind, P: np.ndarray,
                   gamma: float | None = None) -> np.ndarray:
    """Apply one of the three game-Riccati transformations to a symmetric P."""
    P = sym(np.asarray(P, dtype=float))
    if kind == "fa":
        if gamma is None:
            raise ValueError("the disturbance operator requires gamma")
        S = gamma * gamma * np.eye(model.n) - P
        if not is_pd(S):
            raise SingularOrIndefinite(
                f"gamma^2*I - P is not positive definite at gamma={gamma}")
        return sym(P + P @ np.linalg.solve(S, P))
    if kind == "fc":
        return _riccati_step(model, P)
    if kind == "fo":
        return sym(model.A.T @ P @ model.A + model.Q)
    raise ValueError(f"unknown operator kind: {kind!r}")


@dataclass(frozen=True)
class PGammaResult:
    """Outcome of iterating the controlled game-Riccati map from zero."""

    status: Literal["converged", "pd_failed", "no_convergence"]
    p_bar: np.ndarray | None
    iterations: int

    @property
    def feasible(self) -> bool:
        return self.status == "converged"


_STATUS = {0: "converged", 1: "pd_failed", 2: "no_convergence"}


def solve_p_gamma(model: SystemModel, gamma: float, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER) -> PGammaResult:
    """Iterate P <- Fc(Fa(P)) from P0 = 0 for a given attenuation level.

    Returns the fixed point when the iterates stay strictly below gamma^2*I
    and converge; reports "pd_failed" the moment that cone condition breaks
    (the attenuation level is too small) and "no_convergence" when the
    iteration budget runs out.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    code, P, iters = _kernels.pgamma_fixed_point(
        model.A, model.B, model.Q, model.R, float(gamma), tol, max_iter)
    status = _STATUS[code]
    return PGammaResult(status=status, p_bar=P if status == "converged" else None,
                        iterations=iters)
