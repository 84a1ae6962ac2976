"""Dense kernels for basis matrices: factorize, solve, transpose-solve.

Factorizations are plain partial-pivoting LU (LAPACK getrf via scipy),
recomputed from scratch whenever a basis changes.  No rank-one updates:
basis matrices stay small (d <= 50 at the scales this package targets),
so refactoring per pivot is cheaper than chasing update drift.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import SingularError

# A matrix is declared singular iff min |pivot| < SINGULAR_RTOL * max |entry|.
# Smoothed inputs are generic, so tripping this signals a bug or a degenerate
# artificial construction rather than bad luck.
SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class BasisFactorization:
    """Permuted triangular factors of a square matrix, plus its pivot record."""

    lu: np.ndarray
    piv: np.ndarray
    pivots: np.ndarray  # |diag(U)|, in elimination order

    @property
    def d(self) -> int:
        return self.lu.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Multiply the factors back together (test/diagnostic helper)."""
        lower = np.tril(self.lu, -1) + np.eye(self.d)
        upper = np.triu(self.lu)
        m = lower @ upper
        # getrf records row i <-> piv[i] swaps in elimination order; undo them
        # in reverse to recover the original row order.
        for i in range(self.d - 1, -1, -1):
            j = self.piv[i]
            if j != i:
                m[[i, j]] = m[[j, i]]
        return m


def factorize(m: np.ndarray) -> BasisFactorization:
    """LU-factorize a square matrix, raising SingularError below the pivot floor."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    scale = np.abs(m).max()
    if scale == 0.0:
        raise SingularError("zero matrix")
    with warnings.catch_warnings():
        # singularity is decided by the pivot threshold below
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < SINGULAR_RTOL * scale:
        raise SingularError(
            f"pivot {pivots.min():.3e} below {SINGULAR_RTOL:.0e} * {scale:.3e}"
        )
    return BasisFactorization(lu=lu, piv=piv, pivots=pivots)


def solve(f: BasisFactorization, rhs: np.ndarray) -> np.ndarray:
    """Solve A x = rhs for the factorized A."""
    return lu_solve((f.lu, f.piv), np.asarray(rhs, dtype=float), check_finite=False)


def solve_transpose(f: BasisFactorization, rhs: np.ndarray) -> np.ndarray:
    """Solve A^T x = rhs for the factorized A."""
    return lu_solve(
        (f.lu, f.piv), np.asarray(rhs, dtype=float), trans=1, check_finite=False
    )
