from pathlib import Path

import numpy as np
import pytest


def unit_diagonal(n, rng, low=-1.0, high=1.0):
    A = rng.uniform(low, high, (n, n))
    np.fill_diagonal(A, 1.0)
    return A


def random_psd(n, rng, rank=None):
    G = rng.standard_normal((n, rank or n + 2))
    return G @ G.T


def psd_unit_diagonal(n, rng):
    C = random_psd(n, rng)
    d = 1.0 / np.sqrt(np.diag(C))
    H = d[:, None] * C * d[None, :]
    np.fill_diagonal(H, 1.0)
    return 0.5 * (H + H.T)


def conditioned(n, rng, cond):
    """Random matrix with prescribed 2-norm condition number."""
    Q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
    Q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
    s = np.geomspace(1.0, 1.0 / cond, n)
    return (Q1 * s) @ Q2.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_addoption(parser):
    parser.addoption("--regen-golden", action="store_true",
                     help="rewrite tests/golden from the current CLI output")


@pytest.fixture
def golden(request):
    """Compare bytes against tests/golden/<name>, or rewrite it under --regen-golden."""
    root = Path(__file__).parent / "golden"

    def check(name, data):
        path = root / name
        if request.config.getoption("--regen-golden"):
            root.mkdir(exist_ok=True)
            path.write_bytes(data)
        assert path.exists(), f"missing golden {name}; run pytest --regen-golden"
        assert data == path.read_bytes(), f"{name} differs from golden"

    return check
