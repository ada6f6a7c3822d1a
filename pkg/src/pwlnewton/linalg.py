"""Dense linear algebra kernels used by every solver module.

LU factorization with partial pivoting and a scale-invariant singularity
flag (the factorization itself is LAPACK's getrf), power-iteration
estimates of the spectral norm and of the inverse's spectral norm, and a
symmetric eigendecomposition with eigenvalues sorted descending.

All functions are pure: they never mutate their arguments and keep no
shared state, so concurrent calls on distinct inputs need no locking.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    AsymmetricMatrixError,
    DimensionError,
    IterationLimitError,
    SingularMatrixError,
)

# Pivots below PIVOT_RTOL * max|M| mark the factorization singular.
PIVOT_RTOL = 1e-12
# Largest tolerated relative asymmetry max|S - S^T| / max|S| in sym_eig.
SYM_RTOL = 1e-12


def as_vector(x, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} must contain only finite values")
    return v


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} must contain only finite values")
    return m


def as_square_matrix(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


@dataclass
class LuFactors:
    """PM = LU factors in LAPACK's combined storage.

    ``piv`` holds the successive row interchanges as returned by getrf;
    the ``permutation`` property derives the explicit row bijection.
    When ``singular`` is set, no solve may be performed with the factors.
    """

    lu: np.ndarray
    piv: np.ndarray
    singular: bool

    @property
    def n(self) -> int:
        return self.lu.shape[0]

    @property
    def permutation(self) -> np.ndarray:
        perm = np.arange(self.n)
        for i, j in enumerate(self.piv):
            if i != j:
                perm[i], perm[j] = perm[j], perm[i]
        return perm


def lu_factor(m) -> LuFactors:
    """Factor a square matrix as PM = LU with partial pivoting.

    The singular flag is set when any pivot falls below
    PIVOT_RTOL * max|M|, which catches the exactly singular sign-pattern
    matrices produced by the enumerator without tripping on scale.
    """
    m = as_square_matrix(m)
    with warnings.catch_warnings():
        # getrf completes on singular input and leaves a zero pivot in U.
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(m, check_finite=False)
    scale = float(np.abs(m).max())
    pivots = np.abs(np.diag(lu))
    singular = scale == 0.0 or bool((pivots < PIVOT_RTOL * scale).any())
    return LuFactors(lu=lu, piv=piv, singular=singular)


def lu_solve(f: LuFactors, rhs, trans: int = 0) -> np.ndarray:
    """Solve Mx = rhs (or M^T x = rhs for trans=1) from LU factors."""
    if f.singular:
        raise SingularMatrixError("cannot solve with singular LU factors")
    b = np.asarray(rhs, dtype=float)
    if b.shape[0] != f.n:
        raise DimensionError(f"right-hand side has length {b.shape[0]}, expected {f.n}")
    return sla.lu_solve((f.lu, f.piv), b, trans=trans, check_finite=False)


def lu_inverse(f: LuFactors) -> np.ndarray:
    """Explicitly form M^-1 by solving against the identity."""
    return lu_solve(f, np.eye(f.n))


def _power_iteration(apply_gram, n: int, tol: float, max_iter: int) -> float:
    """sqrt of the largest eigenvalue of a PSD operator v -> apply_gram(v).

    Starts from the all-ones vector with a fixed deterministic jitter (so
    the start is never orthogonal to the dominant eigenvector of a
    structured matrix) and stops when the Rayleigh quotient's relative
    change drops below ``tol``.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    v = np.ones(n) + 1e-2 * np.sin(np.arange(1, n + 1))
    v /= np.linalg.norm(v)
    rho_prev = None
    for _ in range(max_iter):
        w = apply_gram(v)
        rho = float(v @ w)
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        if rho_prev is not None and abs(rho - rho_prev) <= tol * max(abs(rho), np.finfo(float).tiny):
            return float(np.sqrt(max(rho, 0.0)))
        rho_prev = rho
    raise IterationLimitError(f"power iteration did not converge within {max_iter} iterations")


def spectral_norm(m, tol: float = 1e-10, max_iter: int = 10000) -> float:
    """Largest singular value of M, via power iteration on M^T M."""
    m = as_matrix(m)
    return _power_iteration(lambda v: m.T @ (m @ v), m.shape[1], tol, max_iter)


def inv_spectral_norm(m, tol: float = 1e-10, max_iter: int = 10000) -> float:
    """||M^-1||, applying M^-1 and M^-T through LU solves.

    The inverse is never formed; each power step solves two triangular
    systems with the factors of M.
    """
    f = lu_factor(m)
    return _inv_norm_from_factors(f, tol, max_iter)


def _inv_norm_from_factors(f: LuFactors, tol: float = 1e-10, max_iter: int = 10000) -> float:
    if f.singular:
        raise SingularMatrixError("matrix is singular; ||M^-1|| is undefined")

    def apply_gram(v):
        return lu_solve(f, lu_solve(f, v), trans=1)

    return _power_iteration(apply_gram, f.n, tol, max_iter)


def sym_eig(s) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition S = W diag(lam) W^T of a symmetric matrix.

    Returns eigenvalues sorted descending and the orthogonal matrix W
    whose columns are the matching eigenvectors.
    """
    s = as_square_matrix(s, "symmetric matrix")
    scale = float(np.abs(s).max())
    if scale > 0.0 and float(np.abs(s - s.T).max()) > SYM_RTOL * scale:
        raise AsymmetricMatrixError("matrix exceeds the symmetry tolerance")
    eigvals, eigvecs = np.linalg.eigh(0.5 * (s + s.T))
    return eigvals[::-1].copy(), eigvecs[:, ::-1].copy()
