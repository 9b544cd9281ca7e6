"""Input validation helpers shared across modules."""

import numpy as np


def as_matrix(a, name="matrix"):
    """Coerce to a 2-d float64 array with finite entries."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={m.ndim}")
    if m.size and not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


def as_vector(a, name="vector"):
    """Coerce to a 1-d float64 array with finite entries."""
    v = np.asarray(a, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got ndim={v.ndim}")
    if v.size and not np.isfinite(v).all():
        raise ValueError(f"{name} contains non-finite entries")
    return v


def check_orthonormal(W, tol=1e-8, name="basis"):
    """Require W to have orthonormal columns up to tol (max-norm on W'W - I)."""
    W = as_matrix(W, name)
    if W.shape[0] < W.shape[1]:
        raise ValueError(f"{name} has more columns than rows ({W.shape})")
    gram = W.T @ W
    err = np.max(np.abs(gram - np.eye(W.shape[1])))
    if err > tol:
        raise ValueError(f"{name} columns are not orthonormal (deviation {err:.3e} > {tol:.1e})")
    return W


def basis_matrix(W):
    """Accept either a raw ndarray or an object carrying .matrix (a basis)."""
    return W.matrix if hasattr(W, "matrix") else np.asarray(W, dtype=np.float64)


def check_seed(seed):
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)
