"""Oblique interpolation projector D = W (S' W)^+ S'.

The projector is stored in factored form: the basis W, the selection S,
and the SVD of the small cross matrix S' W, which applies the
pseudoinverse stably. D reproduces any vector in span(W) and, for
unit-weight selections with s = r points, interpolates exactly at the
selected indices.
"""

from dataclasses import dataclass

import numpy as np

from ._util import basis_matrix, check_orthonormal
from .exceptions import DegenerateSelectionError
from .linalg import spectral_norm
from .selection import SelectionOperator


@dataclass(frozen=True)
class DeimProjector:
    """Factored oblique projector onto span(W) along the selection S.

    mode is 'interpolatory' for unit-weight square selections (s == r) and
    'sampled' otherwise.
    """

    basis: np.ndarray
    selection: SelectionOperator
    cross: np.ndarray
    cross_u: np.ndarray
    cross_s: np.ndarray
    cross_v: np.ndarray
    rank: int
    mode: str

    def apply(self, f):
        """Evaluate D f.

        f may be a full length-n vector or a callable mapping an index
        array to the corresponding components, in which case only the s
        selected components are ever evaluated.
        """
        idx = self.selection.indices
        if callable(f):
            vals = np.asarray(f(idx), dtype=np.float64)
            if vals.shape != idx.shape:
                raise ValueError(f"callable returned shape {vals.shape}, expected {idx.shape}")
            y = self.selection.weights * vals
        else:
            f = np.asarray(f, dtype=np.float64)
            if f.shape != (self.selection.n,):
                raise ValueError(f"f must have shape ({self.selection.n},), got {f.shape}")
            y = self.selection.restrict(f)
        c = self.cross_v @ ((self.cross_u.T @ y) / self.cross_s)
        return self.basis @ c

    def error_constant(self):
        """Exact ||D||_2, computed as the spectral norm of (S' W)^+ S'.

        Left-multiplying by the orthonormal W does not change the norm, so
        the n-by-n operator never has to be formed.
        """
        G = self.cross_v @ (self.cross_u.T / self.cross_s[:, None])  # (S'W)^+, r x s
        scaled = G * self.selection.weights[None, :]
        full = np.zeros((self.selection.n, self.rank))
        np.add.at(full, self.selection.indices, scaled.T)
        return spectral_norm(full.T)

    def error_constant_product(self):
        """Upper bound ||(S' W)^+||_2 * ||S||_2 on the error constant."""
        return float(1.0 / self.cross_s.min()) * self.selection.two_norm()

    def dense(self):
        """Materialize D as an n-by-n array (tests and small problems only)."""
        G = self.cross_v @ (self.cross_u.T / self.cross_s[:, None])
        return self.basis @ G @ self.selection.dense().T


def build_projector(W, S, rank_tol=1e-12):
    """Assemble the oblique projector from a basis and a selection.

    Parameters
    ----------
    W : OrthonormalBasis or ndarray, shape (n, r)
    S : SelectionOperator with s >= r points over the same n
    rank_tol : float
        Relative threshold on the singular spectrum of S' W; the cross
        matrix must have full rank r at this tolerance.

    Raises
    ------
    DegenerateSelectionError
        If S' W is rank deficient, i.e. the points do not see the whole
        basis.
    """
    Wm = check_orthonormal(basis_matrix(W), name="W")
    n, r = Wm.shape
    if S.n != n:
        raise ValueError(f"selection is over {S.n} rows but the basis has {n}")
    if S.s < r:
        raise ValueError(f"selection has {S.s} points, fewer than the basis rank {r}")
    cross = Wm[S.indices, :] * S.weights[:, None]
    U, s, Vt = np.linalg.svd(cross, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= rank_tol * s[0]:
        raise DegenerateSelectionError(
            f"cross matrix S' W is rank deficient "
            f"(sigma_min/sigma_1 = {0.0 if s[0] == 0.0 else s[-1] / s[0]:.3e})"
        )
    mode = "interpolatory" if (S.s == r and np.all(S.weights == 1.0)) else "sampled"
    return DeimProjector(
        basis=Wm,
        selection=S,
        cross=cross,
        cross_u=U,
        cross_s=s,
        cross_v=Vt.T,
        rank=r,
        mode=mode,
    )


def apply(P, f):
    """Function form of DeimProjector.apply."""
    return P.apply(f)


def error_constant(P):
    """Function form of DeimProjector.error_constant."""
    return P.error_constant()
