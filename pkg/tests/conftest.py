import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def random_matrix(m, n, seed):
    return np.random.default_rng(seed).standard_normal((m, n))


def random_orthonormal(n, r, seed):
    Q, _ = np.linalg.qr(random_matrix(n, r, seed))
    return Q


def gap_matrix(n, n_s, rank, gamma, seed, tail="flat"):
    """Synthetic matrix with a controlled spectral gap sigma_{r+1}/sigma_r."""
    rng = np.random.default_rng(seed)
    k = min(n, n_s)
    sv = np.ones(k)
    if tail == "flat":
        sv[rank:] = gamma
    else:
        sv[rank:] = gamma * np.power(0.8, np.arange(k - rank))
    U, _ = np.linalg.qr(rng.standard_normal((n, k)))
    V, _ = np.linalg.qr(rng.standard_normal((n_s, k)))
    return (U * sv) @ V.T, sv


def spectrum_matrix(n, n_s, sv, seed):
    """Matrix with exactly the prescribed singular values."""
    rng = np.random.default_rng(seed)
    k = min(n, n_s)
    sv = np.asarray(sv, dtype=np.float64)
    assert sv.size == k
    U, _ = np.linalg.qr(rng.standard_normal((n, k)))
    V, _ = np.linalg.qr(rng.standard_normal((n_s, k)))
    return (U * sv) @ V.T


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
