"""Plant description: state-space matrices and quadratic weights.

The system is x_{t+1} = A x_t + B u_t + w_t with stage cost
x' Q x + u' R u and disturbance covariance W (h2 setting).  Q must be
symmetric positive semidefinite, R symmetric positive definite, and the
disturbance enters through the identity.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, NotSymmetric

_SYM_RTOL = 1e-9


def _as_matrix(value, name: str) -> np.ndarray:
    M = np.asarray(value, dtype=float)
    if M.ndim != 2:
        raise DimensionMismatch(f"{name} must be a 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def _check_symmetric(M: np.ndarray, name: str) -> np.ndarray:
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    scale = 1.0 + np.max(np.abs(M))
    if np.max(np.abs(M - M.T)) > _SYM_RTOL * scale:
        raise NotSymmetric(f"{name} is not symmetric")
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class SystemModel:
    """Immutable bundle of (A, B, Q, R, W) with validated shapes."""

    A: np.ndarray
    B: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    W: np.ndarray
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        B = _as_matrix(self.B, "B")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise DimensionMismatch(f"B has {B.shape[0]} rows, expected {n}")
        m = B.shape[1]
        Q = _check_symmetric(_as_matrix(self.Q, "Q"), "Q")
        R = _check_symmetric(_as_matrix(self.R, "R"), "R")
        W = _check_symmetric(_as_matrix(self.W, "W"), "W")
        if Q.shape != (n, n):
            raise DimensionMismatch(f"Q has shape {Q.shape}, expected ({n}, {n})")
        if R.shape != (m, m):
            raise DimensionMismatch(f"R has shape {R.shape}, expected ({m}, {m})")
        if W.shape != (n, n):
            raise DimensionMismatch(f"W has shape {W.shape}, expected ({n}, {n})")
        eps = 1e-10
        q_eigs = np.linalg.eigvalsh(Q)
        if q_eigs.min() < -eps * (1.0 + q_eigs.max()):
            raise ValueError("Q must be positive semidefinite")
        if q_eigs.min() <= eps * (1.0 + abs(q_eigs.max())):
            warnings.warn("Q is only positive semidefinite; the h2 results assume Q > 0",
                          stacklevel=2)
        r_eigs = np.linalg.eigvalsh(R)
        if r_eigs.min() <= 0.0:
            raise ValueError("R must be positive definite")
        w_eigs = np.linalg.eigvalsh(W)
        if w_eigs.min() < -eps * (1.0 + abs(w_eigs.max())):
            raise ValueError("W must be positive semidefinite")
        for attr, M in (("A", A), ("B", B), ("Q", Q), ("R", R), ("W", W)):
            M.setflags(write=False)
            object.__setattr__(self, attr, M)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @classmethod
    def from_dict(cls, data: dict) -> "SystemModel":
        missing = [k for k in ("A", "B", "Q", "R") if k not in data]
        if missing:
            raise ValueError(f"model file is missing required keys: {missing}")
        A = _as_matrix(data["A"], "A")
        W = data.get("W")
        if W is None:
            W = np.eye(A.shape[0])
        return cls(A=A, B=data["B"], Q=data["Q"], R=data["R"], W=W,
                   name=data.get("name"))

    @classmethod
    def from_json(cls, path: str | Path) -> "SystemModel":
        with open(path) as fh:
            data = json.load(fh)
        return cls.from_dict(data)


def scalar_model(a: float = 1.0, b: float = 1.0, q: float = 1.0,
                 r: float = 1.0, w: float = 1.0) -> SystemModel:
    """1-D model; with all parameters 1 the Riccati solution is the golden ratio."""
    return SystemModel(A=[[a]], B=[[b]], Q=[[q]], R=[[r]], W=[[w]], name="scalar")
