"""Dense factorization kernels: thin SVD/QR, pivoted and strong rank-revealing
QR, spectral norms, canonical angles, and pseudoinverse application.

Everything operates on plain float64 ndarrays. Factorizations that LAPACK
already does well (thin SVD, unpivoted QR) are delegated to numpy; the
pivoted and strong rank-revealing factorizations are written out explicitly
because their pivot order is part of the contract.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from ._util import as_matrix
from .exceptions import ConvergenceError, RankDeficiencyError


@dataclass(frozen=True)
class ThinSVD:
    """Thin singular value decomposition ``A = U @ diag(s) @ V.T``.

    U is m-by-k, V is n-by-k with k = min(m, n); singular values are sorted
    nonincreasing.
    """

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


@dataclass(frozen=True)
class SRRQRFactors:
    """Strong rank-revealing QR of ``M[:, perm]``.

    ``Q @ [[R11, R12]]`` (padded with the trailing rows of R) reconstructs
    the permuted matrix; R11 is rank-by-rank upper triangular with strictly
    positive diagonal, and every entry of ``inv(R11) @ R12`` is bounded by
    eta in absolute value.
    """

    Q: np.ndarray
    R11: np.ndarray
    R12: np.ndarray
    perm: np.ndarray
    eta: float


@dataclass(frozen=True)
class CanonicalAngles:
    """Principal angles between two equally sized subspaces.

    cosines are sorted nonincreasing; sin_theta_max = sqrt(1 - min(cos)^2)
    is the sine of the largest angle.
    """

    cosines: np.ndarray
    sin_theta_max: float


def thin_svd(A):
    """Thin SVD of a dense matrix.

    Parameters
    ----------
    A : ndarray, shape (m, n)
        Matrix with finite entries.

    Returns
    -------
    ThinSVD
        Factors with k = min(m, n) columns and nonincreasing singular
        values.

    Raises
    ------
    ConvergenceError
        If the underlying LAPACK driver does not converge. The failure is
        explicit; no silently truncated factorization is returned.
    """
    A = as_matrix(A, "A")
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as err:
        raise ConvergenceError(f"SVD did not converge on {A.shape} input: {err}") from err
    return ThinSVD(U=U, singular_values=s, V=Vt.T)


def thin_qr(Y):
    """Thin (reduced) QR factorization of a tall matrix.

    Parameters
    ----------
    Y : ndarray, shape (m, n) with m >= n

    Returns
    -------
    Q : ndarray, shape (m, n)
        Orthonormal columns.
    R : ndarray, shape (n, n)
        Upper triangular with nonnegative diagonal (signs are normalized so
        the factorization matches classical Gram-Schmidt on full-rank
        input).
    """
    Y = as_matrix(Y, "Y")
    m, n = Y.shape
    if m < n:
        raise ValueError(f"thin_qr requires rows >= cols, got {m} x {n}")
    Q, R = np.linalg.qr(Y)
    neg = np.diag(R) < 0
    if neg.any():
        Q[:, neg] *= -1.0
        R[neg, :] *= -1.0
    return Q, R


def pivoted_qr(M):
    """Column-pivoted Householder QR.

    At each step the pivot is the trailing column of largest residual norm,
    recomputed from the updated trailing block; ties go to the first
    (lowest) column index, which makes the pivot sequence deterministic.

    Parameters
    ----------
    M : ndarray, shape (m, n)

    Returns
    -------
    Q : ndarray, shape (m, k) with k = min(m, n)
    R : ndarray, shape (k, n)
        ``Q @ R = M[:, perm]``; the diagonal magnitudes |R[i, i]| are
        nonincreasing.
    perm : ndarray of int, shape (n,)
        Pivot order applied to the columns of M.
    """
    A = as_matrix(M, "M").copy()
    m, n = A.shape
    k = min(m, n)
    perm = np.arange(n)
    Q = np.eye(m)
    for j in range(k):
        norms = np.linalg.norm(A[j:, j:], axis=0)
        pivot = j + int(np.argmax(norms))
        if pivot != j:
            A[:, [j, pivot]] = A[:, [pivot, j]]
            perm[[j, pivot]] = perm[[pivot, j]]
        x = A[j:, j]
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        v = x.copy()
        v[0] += nx if x[0] >= 0 else -nx
        v /= np.linalg.norm(v)
        A[j:, j:] -= 2.0 * np.outer(v, v @ A[j:, j:])
        Q[:, j:] -= 2.0 * np.outer(Q[:, j:] @ v, v)
    R = np.triu(A[:k, :])
    return Q[:, :k], R, perm


def _unpivoted_wide_qr(A):
    # reduced QR that tolerates wide input (R is k-by-n, k = min(m, n))
    return np.linalg.qr(A, mode="reduced")


def srrqr(M, rank, eta=2.0, max_swaps=None):
    """Strong rank-revealing QR (pivoted QR plus pairwise swap refinement).

    Starting from column-pivoted QR, columns of the leading block are
    swapped against trailing columns while any entry of ``inv(R11) @ R12``
    exceeds eta; each swap strictly grows the volume of the selected
    column set, so the loop terminates for eta > 1. On exit the entrywise
    bound guarantees
    ``sigma_min(R11) >= sigma_rank(M) / sqrt(1 + eta^2 rank (n - rank))``.

    Parameters
    ----------
    M : ndarray, shape (m, n)
    rank : int
        Number of leading columns to reveal, 1 <= rank <= min(m, n).
    eta : float, >= 1
        Entrywise interaction bound. 2.0 keeps the swap count low while
        staying within a constant factor of the optimal volume.
    max_swaps : int, optional
        Swap budget; defaults to 50 * n.

    Returns
    -------
    SRRQRFactors

    Raises
    ------
    RankDeficiencyError
        If the leading block is numerically singular (matrix rank below
        the requested rank).
    ConvergenceError
        If the swap budget is exhausted (only reachable for eta at the
        degenerate limit 1 with adversarial near-ties); the message names
        the cap.
    """
    A = as_matrix(M, "M")
    m, n = A.shape
    r = int(rank)
    if not 1 <= r <= min(m, n):
        raise ValueError(f"rank must be in [1, {min(m, n)}], got {rank}")
    if eta < 1.0:
        raise ValueError(f"eta must be >= 1, got {eta}")
    cap = 50 * n if max_swaps is None else int(max_swaps)

    Q, R, perm = pivoted_qr(A)
    swaps = 0
    while True:
        R11 = R[:r, :r]
        dmin = np.min(np.abs(np.diag(R11)))
        if dmin <= max(m, n) * np.finfo(np.float64).eps * abs(R[0, 0]) or R[0, 0] == 0.0:
            raise RankDeficiencyError(
                f"leading {r} x {r} block is numerically singular "
                f"(matrix rank below {r})"
            )
        if r == n:
            break
        T = solve_triangular(R11, R[:r, r:], lower=False)
        i, j = np.unravel_index(np.argmax(np.abs(T)), T.shape)
        if abs(T[i, j]) <= eta:
            break
        if swaps == cap:
            raise ConvergenceError(
                f"srrqr swap cap of {cap} (50 per column) exceeded at eta={eta}"
            )
        perm[[i, r + j]] = perm[[r + j, i]]
        Q, R = _unpivoted_wide_qr(A[:, perm])
        swaps += 1

    # normalize signs so the leading diagonal is strictly positive
    Q = Q.copy()
    R = R.copy()
    for i in range(r):
        if R[i, i] < 0:
            R[i, :] *= -1.0
            Q[:, i] *= -1.0
    return SRRQRFactors(Q=Q, R11=R[:r, :r], R12=R[:r, r:], perm=perm, eta=float(eta))


def spectral_norm(M):
    """Largest singular value of M (0.0 for an all-zero matrix)."""
    M = as_matrix(M, "M")
    if M.size == 0 or not M.any():
        return 0.0
    try:
        return float(np.linalg.svd(M, compute_uv=False)[0])
    except np.linalg.LinAlgError as err:
        raise ConvergenceError(f"SVD did not converge computing a norm: {err}") from err


def canonical_angles(W, Wh):
    """Canonical (principal) angles between two orthonormal column spans.

    Cosines are the singular values of ``W.T @ Wh`` clamped into [0, 1];
    the largest-angle sine follows as sqrt(1 - min(cos)^2). When the two
    arrays are identical the angles are returned as exact zeros, so the
    degenerate case does not pick up SVD round-off.

    Parameters
    ----------
    W, Wh : ndarray, shape (n, r)
        Matrices with orthonormal columns and equal shapes.

    Returns
    -------
    CanonicalAngles
    """
    W = as_matrix(W, "W")
    Wh = as_matrix(Wh, "Wh")
    if W.shape != Wh.shape:
        raise ValueError(f"subspace dimensions differ: {W.shape} vs {Wh.shape}")
    _require_orthonormal(W, "W")
    _require_orthonormal(Wh, "Wh")
    if np.array_equal(W, Wh):
        return CanonicalAngles(cosines=np.ones(W.shape[1]), sin_theta_max=0.0)
    s = np.linalg.svd(W.T @ Wh, compute_uv=False)
    cos = np.clip(s, 0.0, 1.0)
    sin_max = float(np.sqrt(max(0.0, 1.0 - cos[-1] ** 2)))
    return CanonicalAngles(cosines=cos, sin_theta_max=sin_max)


def _require_orthonormal(W, name, tol=1e-8):
    gram = W.T @ W
    err = np.max(np.abs(gram - np.eye(W.shape[1])))
    if err > tol:
        raise ValueError(f"{name} columns are not orthonormal (deviation {err:.3e})")


def pinv_apply(M, X, rank_tol=1e-12):
    """Apply the Moore-Penrose pseudoinverse: compute ``pinv(M) @ X``.

    Computed through the SVD of M with singular values at or below
    ``rank_tol * sigma_1`` discarded. A square, well-conditioned M takes
    the exact-solve path instead. An all-zero M yields the zero result
    (consistent with the pseudoinverse) and emits a RuntimeWarning naming
    the zero rank.

    Parameters
    ----------
    M : ndarray, shape (p, q)
    X : ndarray, shape (p,) or (p, k)
    rank_tol : float
        Relative truncation threshold for the singular spectrum.
    """
    M = as_matrix(M, "M")
    X = np.asarray(X, dtype=np.float64)
    vec = X.ndim == 1
    X2 = X[:, None] if vec else X
    if X2.shape[0] != M.shape[0]:
        raise ValueError(f"shape mismatch: M is {M.shape}, X has {X2.shape[0]} rows")

    f = thin_svd(M)
    s = f.singular_values
    if s.size == 0 or s[0] == 0.0:
        import warnings

        warnings.warn("pinv_apply: matrix has rank 0; returning zeros", RuntimeWarning)
        out = np.zeros((M.shape[1], X2.shape[1]))
        return out[:, 0] if vec else out
    keep = s > rank_tol * s[0]
    if M.shape[0] == M.shape[1] and keep.all() and s[-1] / s[0] > 1e-10:
        out = np.linalg.solve(M, X2)
    else:
        out = f.V[:, keep] @ ((f.U[:, keep].T @ X2) / s[keep, None])
    return out[:, 0] if vec else out
