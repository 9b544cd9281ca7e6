"""Interpolation-point selection: deterministic pivoting and randomized
leverage-score sampling, plus the hybrid two-stage scheme.

A selection is represented sparsely by row indices and positive column
weights; the dense operator S has columns weights[k] * e_indices[k].
Deterministic selectors produce distinct indices with unit weights;
sampled selectors may repeat indices and carry the usual 1/sqrt(s * pi)
scaling that makes E[S S'] the identity.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ._util import as_matrix, basis_matrix, check_orthonormal, check_seed
from .exceptions import DegenerateBasisError, DegenerateSelectionError, RankDeficiencyError
from .linalg import pivoted_qr, srrqr


@dataclass(frozen=True)
class SelectionOperator:
    """Sparse n-by-s selection-and-scaling operator.

    Column k of the dense operator is weights[k] times the indices[k]-th
    standard basis vector, so S' x picks and scales entries
    ``(S' x)[k] = weights[k] * x[indices[k]]``.
    """

    indices: np.ndarray
    weights: np.ndarray
    n: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        w = np.asarray(self.weights, dtype=np.float64)
        if idx.ndim != 1 or w.ndim != 1 or idx.size != w.size:
            raise ValueError("indices and weights must be 1-d and equally long")
        if idx.size == 0:
            raise ValueError("selection must contain at least one point")
        if idx.min() < 0 or idx.max() >= self.n:
            raise ValueError(f"indices must lie in [0, {self.n})")
        if not np.isfinite(w).all() or (w <= 0).any():
            raise ValueError("weights must be positive and finite")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)

    @property
    def s(self):
        return self.indices.size

    @property
    def is_unit_weight(self):
        return bool(np.all(self.weights == 1.0))

    def restrict(self, x):
        """Apply S': pick and scale the selected entries of x."""
        x = np.asarray(x, dtype=np.float64)
        return self.weights * x[self.indices] if x.ndim == 1 else self.weights[:, None] * x[self.indices]

    def expand(self, y):
        """Apply S: scatter weighted entries into R^n (duplicates add)."""
        y = np.asarray(y, dtype=np.float64)
        out = np.zeros(self.n)
        np.add.at(out, self.indices, self.weights * y)
        return out

    def dense(self):
        """Materialize S as an n-by-s array (small cases / tests)."""
        S = np.zeros((self.n, self.s))
        S[self.indices, np.arange(self.s)] = self.weights
        return S

    def two_norm(self):
        """||S||_2; S S' is diagonal, so this is a max over accumulated weights."""
        acc = np.zeros(self.n)
        np.add.at(acc, self.indices, self.weights**2)
        return float(np.sqrt(acc.max()))


@dataclass(frozen=True)
class LeveragePMF:
    """Sampling distribution mixing leverage scores with the uniform law."""

    leverage: np.ndarray
    beta: float
    probs: np.ndarray
    rank: int


def leverage_scores(W):
    """Row leverage scores of an orthonormal basis: l_j = ||W[j, :]||^2.

    They sum to the basis rank; their maximum is the coherence.
    """
    W = check_orthonormal(basis_matrix(W), name="W")
    return np.sum(W * W, axis=1)


def mixed_pmf(leverage, rank, beta):
    """Mix the normalized leverage scores with the uniform distribution.

    probs[j] = beta * leverage[j] / rank + (1 - beta) / n, which keeps
    every probability at least (1 - beta) / n.

    Parameters
    ----------
    leverage : ndarray
        Row leverage scores; they must sum to rank.
    rank : int
    beta : float in (0, 1), exclusive at both ends.
    """
    lev = np.asarray(leverage, dtype=np.float64)
    if lev.ndim != 1 or lev.size == 0:
        raise ValueError("leverage must be a nonempty 1-d array")
    if (lev < 0).any():
        raise ValueError("leverage scores must be nonnegative")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie strictly inside (0, 1), got {beta}")
    r = int(rank)
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    if abs(lev.sum() - r) > 1e-10 * max(1.0, r):
        raise ValueError(f"leverage scores sum to {lev.sum()!r}, expected rank {r}")
    n = lev.size
    probs = beta * lev / r + (1.0 - beta) / n
    return LeveragePMF(leverage=lev, beta=float(beta), probs=probs, rank=r)


def sample_count_bound(rank, beta, eps, delta, n=None):
    """Sample count for the leverage sampling guarantee (natural log).

    ceil((2 r / (beta eps^2)) * log(r / delta)). When n is given and the
    count exceeds it, the count is capped at n with a warning (sampling
    more rows than exist brings nothing).
    """
    r = int(rank)
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    for name, val in (("beta", beta), ("eps", eps), ("delta", delta)):
        if not 0.0 < val < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {val}")
    if r / delta <= 1.0:
        raise ValueError(f"rank/delta must exceed 1 for a positive log, got {r / delta}")
    count = int(np.ceil(2.0 * r / (beta * eps * eps) * np.log(r / delta)))
    if n is not None and count > n:
        warnings.warn(
            f"leverage sample count {count} exceeds the row count {n}; capping at {n}",
            RuntimeWarning,
        )
        count = int(n)
    return count


def practical_sample_count(rank):
    """The cheaper working rule ceil(3 r ln r) used when no tail guarantee is needed."""
    r = int(rank)
    if r < 2:
        raise ValueError(f"rank must be >= 2 for a positive count, got {rank}")
    return int(np.ceil(3.0 * r * np.log(r)))


def leverage_select(W, pmf, s, seed):
    """Sample s rows with replacement from pmf and scale for unbiasedness.

    Column k of S is e_{t_k} / sqrt(s * probs[t_k]), which makes
    E[S S'] = I. Duplicate draws are kept.
    """
    W = basis_matrix(W)
    n = W.shape[0]
    if pmf.probs.size != n:
        raise ValueError(f"pmf is over {pmf.probs.size} rows but W has {n}")
    s = int(s)
    if s < 1:
        raise ValueError(f"sample count must be >= 1, got {s}")
    rng = np.random.default_rng(check_seed(seed))
    idx = rng.choice(n, size=s, replace=True, p=pmf.probs)
    weights = 1.0 / np.sqrt(s * pmf.probs[idx])
    return SelectionOperator(indices=idx, weights=weights, n=n)


def hybrid_select(W, pmf, c_ls, eta=2.0, seed=0):
    """Two-stage selection: leverage sampling, then a strong RRQR prune.

    Stage one draws c_ls weighted rows; stage two runs the strong
    rank-revealing QR on W' S1 and keeps the r revealed columns, yielding
    exactly r weighted points.

    Returns
    -------
    (S1, S2, S) : SelectionOperator triple
        The sampling stage (n -> c_ls), the pruning stage expressed inside
        the sampled coordinates (c_ls -> r), and their composition
        (n -> r).

    Raises
    ------
    DegenerateSelectionError
        If the sampled rows do not expose rank r against the basis.
    """
    Wm = check_orthonormal(basis_matrix(W), name="W")
    n, r = Wm.shape
    c_ls = int(c_ls)
    if c_ls < r:
        raise ValueError(f"c_ls must be at least the basis rank {r}, got {c_ls}")
    S1 = leverage_select(Wm, pmf, c_ls, seed)
    M = (Wm[S1.indices, :] * S1.weights[:, None]).T  # r x c_ls, equals W' S1
    try:
        fac = srrqr(M, r, eta)
    except RankDeficiencyError as err:
        raise DegenerateSelectionError(
            f"sampled rows span only a deficient subspace: {err}"
        ) from err
    keep = fac.perm[:r]
    S2 = SelectionOperator(indices=keep, weights=np.ones(r), n=c_ls)
    S = SelectionOperator(indices=S1.indices[keep], weights=S1.weights[keep], n=n)
    cross = Wm[S.indices, :] * S.weights[:, None]
    sv = np.linalg.svd(cross, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise DegenerateSelectionError(
            f"final selection is numerically rank deficient (sigma_min/sigma_1 = {sv[-1] / sv[0]:.3e})"
        )
    return S1, S2, S


def pqr_select(W):
    """Deterministic selection from column-pivoted QR of W'."""
    Wm = check_orthonormal(basis_matrix(W), name="W")
    r = Wm.shape[1]
    _, _, perm = pivoted_qr(Wm.T)
    return SelectionOperator(indices=perm[:r], weights=np.ones(r), n=Wm.shape[0])


def srrqr_select(W, eta=2.0):
    """Deterministic selection from the strong rank-revealing QR of W'.

    The revealed pivots guarantee
    ``||inv(S' W)||_2 <= sqrt(1 + eta^2 r (n - r))``.
    """
    Wm = check_orthonormal(basis_matrix(W), name="W")
    n, r = Wm.shape
    fac = srrqr(Wm.T, r, eta)
    return SelectionOperator(indices=fac.perm[:r], weights=np.ones(r), n=n)


def deim_greedy_select(W):
    """Classic greedy selection: walk the basis columns in order, placing
    each new point at the largest interpolation residual of the next column.

    Expects the columns of W ordered by importance (e.g. singular vectors).
    """
    Wm = check_orthonormal(basis_matrix(W), name="W")
    n, r = Wm.shape
    idx = np.empty(r, dtype=np.intp)
    idx[0] = int(np.argmax(np.abs(Wm[:, 0])))
    for k in range(1, r):
        w = Wm[:, k]
        try:
            c = np.linalg.solve(Wm[idx[:k], :k], w[idx[:k]])
        except np.linalg.LinAlgError as err:
            raise DegenerateBasisError(
                f"greedy subsystem singular at step {k}: {err}"
            ) from err
        res = w - Wm[:, :k] @ c
        idx[k] = int(np.argmax(np.abs(res)))
    if np.unique(idx).size != r:
        raise DegenerateBasisError("greedy selection produced a repeated index")
    return SelectionOperator(indices=idx, weights=np.ones(r), n=n)
