"""NumPy implementations of the hot kernels.

Fallback used when the compiled extension is unavailable (or forced via
SCHEDOPT_BACKEND=pure).  The trial simulator is vectorized across trials so
the pure path stays usable at acceptance-scale horizons.
"""

from __future__ import annotations

import numpy as np

NAME = "pure"


def _chol_pd(M: np.ndarray) -> bool:
    tol = 1e-9 * (1.0 + np.max(np.abs(M)))
    try:
        np.linalg.cholesky(M - tol * np.eye(M.shape[0]))
    except np.linalg.LinAlgError:
        return False
    return True


def pgamma_fixed_point(A, B, Q, R, gamma, tol, max_iter):
    """Iterate P <- Fc(Fa(P)) from 0.  Returns (code, P, iterations).

    code 0: converged, 1: gamma^2*I - P lost definiteness, 2: out of budget.
    """
    n = A.shape[0]
    g2I = gamma * gamma * np.eye(n)
    P = np.zeros((n, n))
    for it in range(1, max_iter + 1):
        S = g2I - P
        if not _chol_pd(S):
            return 1, None, it
        F = P + P @ np.linalg.solve(S, P)
        F = 0.5 * (F + F.T)
        Sc = R + B.T @ F @ B
        AFB = A.T @ F @ B
        P_next = A.T @ F @ A + Q - AFB @ np.linalg.solve(Sc, AFB.T)
        P_next = 0.5 * (P_next + P_next.T)
        if np.max(np.abs(P_next - P)) < tol:
            return 0, P_next, it
        P = P_next
    return 2, None, max_iter


def simulate_trials(A, B, K, Q, R, sigma, noise):
    """Closed-loop cost sums for a batch of trials.

    sigma is one period of the sampling pattern (1 = state measured); noise
    has shape (trials, T, n).  Returns the per-trial sum over t of
    x'Qx + u'Ru under the certainty-equivalence controller with predictor
    reset at sampling instants.
    """
    N, T, n = noise.shape
    h = len(sigma)
    x = np.zeros((n, N))
    xhat = np.zeros((n, N))
    costs = np.zeros(N)
    for t in range(T):
        if sigma[t % h]:
            xhat = x
        u = K @ xhat
        costs += np.einsum("in,in->n", x, Q @ x) + np.einsum("in,in->n", u, R @ u)
        drive = B @ u
        x = A @ x + drive + noise[:, t, :].T
        xhat = A @ xhat + drive
    return costs
