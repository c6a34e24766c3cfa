"""Independent verification machinery.

Monte Carlo estimation of the closed-loop average cost under the
certainty-equivalence controller, the finite-horizon completion-of-squares
identity checker, and the lower-bounding iteration from the LQ solution up
to the game-Riccati fixed point.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InfeasibleGamma, InvalidHorizon, NonConvergence, SingularIterate, SingularOrIndefinite
from .matops import RiccatiData, apply_operator, solve_dare, solve_p_gamma
from .model import SystemModel
from .schedule import Schedule


@dataclass(frozen=True)
class SimReport:
    schedule: Schedule
    horizon: int
    trials: int
    seed: int
    empirical_mean: float
    std_error: float


def _sqrt_psd(W: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(W)
    return vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def _trial_noise(seed: int, trial: int, horizon: int, n: int,
                 w_sqrt: np.ndarray) -> np.ndarray:
    # Counter-based stream per (seed, trial): trials are order-independent.
    rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
    return rng.standard_normal((horizon, n)) @ w_sqrt.T


def _thread_count() -> int:
    raw = os.environ.get("SCHEDOPT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def monte_carlo_j2(model: SystemModel, riccati: RiccatiData, s: Schedule,
                   horizon: int, trials: int, seed: int) -> SimReport:
    """Estimate the average cost by simulating the closed loop.

    Controller: u = K xhat with xhat reset to the measured state at sampling
    instants and propagated through the plant model in between; disturbances
    are Gaussian with covariance W.  Reproducible per seed; per-trial RNG
    streams make the result independent of execution order.
    """
    if horizon < 1 or horizon % s.period != 0:
        raise InvalidHorizon(
            f"horizon must be a positive multiple of the period {s.period}")
    if trials < 1:
        raise ValueError("need at least one trial")
    sigma = np.array(s.to_sigma(), dtype=np.int8)
    w_sqrt = _sqrt_psd(model.W)

    def run_chunk(trial_ids: range) -> np.ndarray:
        noise = np.stack([_trial_noise(seed, t, horizon, model.n, w_sqrt)
                          for t in trial_ids])
        return _kernels.simulate_trials(model.A, model.B, riccati.K,
                                        model.Q, model.R, sigma, noise)

    threads = min(_thread_count(), trials)
    if threads == 1:
        costs = run_chunk(range(trials))
    else:
        bounds = np.linspace(0, trials, threads + 1, dtype=int)
        chunks = [range(a, b) for a, b in zip(bounds, bounds[1:]) if a < b]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            costs = np.concatenate(list(pool.map(run_chunk, chunks)))

    per_trial = costs / horizon
    mean = float(np.mean(per_trial))
    stderr = float(np.std(per_trial, ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return SimReport(schedule=s, horizon=horizon, trials=trials, seed=seed,
                     empirical_mean=mean, std_error=stderr)


def phase_error_covariance(model: SystemModel, s: Schedule, horizon: int,
                           trials: int, seed: int) -> np.ndarray:
    """Empirical covariance of the estimation error at each phase of the period.

    The error resets to zero at sampling instants and accumulates forward
    disturbance terms in between; returns an (h, n, n) array of per-phase
    averages over trials and periods.
    """
    if horizon < 1 or horizon % s.period != 0:
        raise InvalidHorizon(
            f"horizon must be a positive multiple of the period {s.period}")
    h = s.period
    n = model.n
    sigma = s.to_sigma()
    w_sqrt = _sqrt_psd(model.W)
    acc = np.zeros((h, n, n))
    counts = np.zeros(h)
    for trial in range(trials):
        noise = _trial_noise(seed, trial, horizon, n, w_sqrt)
        e = np.zeros(n)
        for t in range(horizon):
            if sigma[t % h]:
                e = np.zeros(n)
            acc[t % h] += np.outer(e, e)
            counts[t % h] += 1
            e = model.A @ e + noise[t]
    return acc / counts[:, None, None]


def residual_lemma3(model: SystemModel, gamma: float, tau: int,
                    Y0: np.ndarray, x0: np.ndarray, u_seq: np.ndarray,
                    w_seq: np.ndarray) -> float:
    """Normalized defect of the finite-horizon completion-of-squares identity.

    Runs the backward controlled game-Riccati recursion from the terminal
    weight Y0, then evaluates both sides of the identity on the supplied
    trajectory and returns |LHS - RHS| / (1 + |LHS|).
    """
    Y0 = np.asarray(Y0, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    u_seq = np.asarray(u_seq, dtype=float).reshape(tau, model.m)
    w_seq = np.asarray(w_seq, dtype=float).reshape(tau, model.n)
    g2I = gamma * gamma * np.eye(model.n)

    P = [None] * (tau + 1)
    P[tau] = 0.5 * (Y0 + Y0.T)
    for k in range(tau, 0, -1):
        try:
            P[k - 1] = apply_operator(model, "fc",
                                      apply_operator(model, "fa", P[k], gamma))
        except SingularOrIndefinite as exc:
            raise SingularIterate(
                f"gamma^2*I - P_{k} lost definiteness in the backward pass") from exc

    lhs = 0.0
    x = x0.copy()
    xs = [x.copy()]
    for k in range(tau):
        u, w = u_seq[k], w_seq[k]
        lhs += float(x @ model.Q @ x + u @ model.R @ u - gamma * gamma * (w @ w))
        x = model.A @ x + model.B @ u + w
        xs.append(x.copy())
    lhs += float(xs[tau] @ P[tau] @ xs[tau])

    rhs = float(x0 @ P[0] @ x0)
    for k in range(tau):
        F = apply_operator(model, "fa", P[k + 1], gamma)
        S = model.R + model.B.T @ F @ model.B
        K_k = -np.linalg.solve(S, model.B.T @ F @ model.A)
        L_k = np.linalg.solve(g2I - P[k + 1], P[k + 1])
        du = u_seq[k] - K_k @ xs[k]
        dw = w_seq[k] - L_k @ (model.A @ xs[k] + model.B @ u_seq[k])
        rhs += float(du @ S @ du)
        rhs -= float(dw @ (g2I - P[k + 1]) @ dw)
    return abs(lhs - rhs) / (1.0 + abs(lhs))


@dataclass(frozen=True)
class GIterate:
    q: int
    G: np.ndarray
    gap: float


def g_iteration(model: SystemModel, gamma: float, alpha: float = 1e-6,
                q_max: int = 10_000) -> list[GIterate]:
    """Iterate the controlled game-Riccati map up from the LQ solution.

    Starts at the standard LQ Riccati solution and stops once the iterate is
    within alpha of the game-Riccati fixed point in max-absolute-entry norm.
    """
    result = solve_p_gamma(model, gamma)
    if not result.feasible:
        raise InfeasibleGamma(f"gamma={gamma} is below the achievable bound")
    p_bar = result.p_bar
    G = solve_dare(model).P
    iterates = [GIterate(q=0, G=G, gap=float(np.max(np.abs(G - p_bar))))]
    if iterates[0].gap < alpha:
        return iterates
    for q in range(1, q_max + 1):
        G = apply_operator(model, "fc", apply_operator(model, "fa", G, gamma))
        gap = float(np.max(np.abs(G - p_bar)))
        iterates.append(GIterate(q=q, G=G, gap=gap))
        if gap < alpha:
            return iterates
    raise NonConvergence(
        f"iterates did not reach the fixed point within {q_max} steps at alpha={alpha}")
