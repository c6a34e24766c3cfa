import json
from pathlib import Path

import numpy as np
import pytest

from schedopt import SystemModel, scalar_model, solve_dare

DATA = Path(__file__).resolve().parents[1] / "src" / "schedopt" / "data"

# Published reference values for the bundled benchmark, h = 1..6.
TABLE_BETA = [0.0, 38.1, 179.1, 548.2, 1361.3, 2960.2]
TABLE_J2 = [14.3, 33.4, 73.9, 151.9, 286.5, 507.6]
TABLE_GAMMA = [3.805, 7.97, 14.55, 24.18, 37.45, 54.58]

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


@pytest.fixture(scope="session")
def bench_model():
    return SystemModel.from_json(DATA / "paper5.json")


@pytest.fixture(scope="session")
def bench_ric(bench_model):
    return solve_dare(bench_model)


@pytest.fixture(scope="session")
def scalar():
    return scalar_model()


@pytest.fixture(scope="session")
def scalar_ric(scalar):
    return solve_dare(scalar)


def random_model(rng, n=None, unstable=False):
    """Random well-posed model with controlled spectral radius."""
    if n is None:
        n = int(rng.integers(1, 5))
    A = rng.standard_normal((n, n))
    rho = float(np.max(np.abs(np.linalg.eigvals(A))))
    if rho < 1e-6:
        A = A + np.eye(n)
        rho = float(np.max(np.abs(np.linalg.eigvals(A))))
    target = rng.uniform(1.05, 1.3) if unstable else rng.uniform(0.3, 0.95)
    A = A * (target / rho)
    m = int(rng.integers(1, n + 1))
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((n, n))
    Q = C @ C.T + 0.1 * np.eye(n)
    D = rng.standard_normal((m, m))
    R = D @ D.T + 0.1 * np.eye(m)
    E = rng.standard_normal((n, n))
    W = E @ E.T
    return SystemModel(A=A, B=B, Q=Q, R=R, W=W)


def random_psd(rng, n, scale=1.0):
    M = rng.standard_normal((n, n))
    return scale * (M @ M.T)


@pytest.fixture
def scalar_json(tmp_path):
    path = tmp_path / "scalar.json"
    path.write_text(json.dumps(
        {"A": [[1]], "B": [[1]], "Q": [[1]], "R": [[1]], "W": [[1]]}))
    return str(path)
