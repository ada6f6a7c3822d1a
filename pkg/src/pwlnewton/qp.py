"""Nonnegative quadratic programming via the piecewise linear system.

minimize 1/2 x^T Q x + x^T b_tilde + c over x >= 0, with Q symmetric
positive definite.  The optimality conditions reduce to the piecewise
linear equation [Q - I] x+ + x = -b_tilde, solved here by the same
pattern-driven Newton iteration as the T/b form; the QP solution is then
the positive part of the equation's solution.

Projection onto a simplicial cone {A x : x >= 0} is the special case
Q = A^T A, b_tilde = -A^T z, and is exposed directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DimensionError, EquivalenceUnavailableError, SingularMatrixError
from .linalg import as_square_matrix, as_vector, lu_factor, lu_inverse, spectral_norm, sym_eig
from .pwls import (
    ConditionReport,
    PwlsProblem,
    SignPattern,
    SolveReport,
    SolverOptions,
    _iterate_patterns,
)


@dataclass
class QpProblem:
    """QP data (Q, b_tilde, c); Q is symmetrized to (Q + Q^T)/2 on ingestion.

    Symmetrizing loses nothing (the quadratic form is unchanged) and makes
    downstream symmetry assumptions unconditional.  Positive definiteness
    is deliberately not checked here; call is_positive_definite when the
    guarantee matters, since the check costs a full eigendecomposition.
    """

    Q: np.ndarray
    b_tilde: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        q = as_square_matrix(self.Q, "Q")
        self.Q = 0.5 * (q + q.T)
        self.b_tilde = as_vector(self.b_tilde, "b_tilde")
        if self.b_tilde.size != self.Q.shape[0]:
            raise DimensionError(
                f"b_tilde has length {self.b_tilde.size} but Q is "
                f"{self.Q.shape[0]}x{self.Q.shape[1]}"
            )
        self.c = float(self.c)

    @property
    def n(self) -> int:
        return self.b_tilde.size

    def is_positive_definite(self) -> bool:
        eigenvalues, _ = sym_eig(self.Q)
        return bool(eigenvalues[-1] > 0.0)


@dataclass
class ConeInstance:
    """A simplicial cone {A x : x >= 0} (A nonsingular) and a point z."""

    A: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        self.A = as_square_matrix(self.A, "A")
        self.z = as_vector(self.z, "z")
        if self.z.size != self.A.shape[0]:
            raise DimensionError(
                f"z has length {self.z.size} but A is {self.A.shape[0]}x{self.A.shape[1]}"
            )
        if lu_factor(self.A).singular:
            raise SingularMatrixError("A must be nonsingular to define a simplicial cone")

    @property
    def n(self) -> int:
        return self.z.size


@dataclass
class KktResidual:
    """Violations of x >= 0, Qx + b_tilde >= 0, <Qx + b_tilde, x> = 0."""

    primal_violation: float
    dual_violation: float
    complementarity: float

    @property
    def worst(self) -> float:
        return max(self.primal_violation, self.dual_violation, self.complementarity)


class ConeProjectionResult(NamedTuple):
    v: np.ndarray
    projection: np.ndarray
    report: SolveReport


def qp_residual(q: QpProblem, x) -> np.ndarray:
    """Residual [Q - I] x+ + x + b_tilde of the underlying equation."""
    x = as_vector(x)
    if x.size != q.n:
        raise DimensionError(f"x has length {x.size}, expected {q.n}")
    qm_i = q.Q - np.eye(q.n)
    return qm_i @ np.maximum(x, 0.0) + x + q.b_tilde


def qp_newton_solve(q: QpProblem, x0, opts: Optional[SolverOptions] = None) -> SolveReport:
    """Newton iteration x_{k+1} = -([Q - I] diag(s_k) + I)^-1 b_tilde.

    Shares all termination and cycle machinery with the T/b solver.  For
    symmetric positive definite Q the step matrix is provably nonsingular,
    so a SingularJacobian outcome on SPD input indicates a numerical
    defect rather than an expected failure mode.  On convergence the
    report's solution solves the piecewise linear equation; apply
    recover_qp_solution to obtain the QP minimizer.
    """
    opts = opts if opts is not None else SolverOptions()
    qm_i = q.Q - np.eye(q.n)

    def matrix_for(bits: SignPattern) -> np.ndarray:
        # [Q - I] diag(s) + I scales the columns picked by the pattern
        m = qm_i * np.asarray(bits, dtype=float)[np.newaxis, :]
        idx = np.arange(q.n)
        m[idx, idx] += 1.0
        return m

    return _iterate_patterns(
        x0,
        opts,
        matrix_for=matrix_for,
        rhs=-q.b_tilde,
        residual_of=lambda x: qm_i @ np.maximum(x, 0.0) + x + q.b_tilde,
        residual_scale=1.0 + float(np.abs(q.b_tilde).max()),
    )


def recover_qp_solution(x_star) -> np.ndarray:
    """Positive part of the equation's solution: the QP minimizer."""
    return np.maximum(as_vector(x_star), 0.0)


def kkt_residual(q: QpProblem, x) -> KktResidual:
    x = as_vector(x)
    if x.size != q.n:
        raise DimensionError(f"x has length {x.size}, expected {q.n}")
    gradient = q.Q @ x + q.b_tilde
    return KktResidual(
        primal_violation=float(np.abs(np.minimum(x, 0.0)).max()),
        dual_violation=float(np.abs(np.minimum(gradient, 0.0)).max()),
        complementarity=float(abs(gradient @ x)),
    )


def kkt_scale(q: QpProblem) -> float:
    """Relative scale 1 + ||b_tilde||_inf + max absolute row sum of Q."""
    return 1.0 + float(np.abs(q.b_tilde).max()) + float(np.abs(q.Q).sum(axis=1).max())


def qp_objective(q: QpProblem, x) -> float:
    x = as_vector(x)
    if x.size != q.n:
        raise DimensionError(f"x has length {x.size}, expected {q.n}")
    return float(0.5 * x @ (q.Q @ x) + x @ q.b_tilde + q.c)


def qp_to_pwls(q: QpProblem) -> PwlsProblem:
    """Rewrite the QP equation in T/b form: T = [Q - I]^-1, b = -T b_tilde.

    Only valid when Q - I is nonsingular (no eigenvalue of Q equals 1);
    otherwise EquivalenceUnavailableError is raised and callers should use
    qp_newton_solve directly, which needs no inverse.
    """
    f = lu_factor(q.Q - np.eye(q.n))
    if f.singular:
        raise EquivalenceUnavailableError("Q - I is singular; the T/b form does not exist")
    T = lu_inverse(f)
    return PwlsProblem(T=T, b=-(T @ q.b_tilde))


def check_qp_conditions(q: QpProblem) -> ConditionReport:
    """Same diagnostics as the T/b form, driven by ||Q - I||.

    Under the T = [Q - I]^-1 equivalence, ||T^-1|| equals ||Q - I||, so
    the report's fields keep their meaning.
    """
    beta = spectral_norm(q.Q - np.eye(q.n))
    existence_ok = beta < 1.0
    return ConditionReport(
        inv_norm=beta,
        existence_ok=existence_ok,
        rate_ok=beta < 0.5,
        contraction_modulus=beta,
        predicted_rate=beta / (1.0 - beta) if existence_ok else None,
    )


def cone_instance_to_qp(ci: ConeInstance) -> QpProblem:
    """QP whose minimizer v satisfies projection(z) = A v."""
    return QpProblem(Q=ci.A.T @ ci.A, b_tilde=-(ci.A.T @ ci.z), c=0.5 * float(ci.z @ ci.z))


def cone_projection(
    ci: ConeInstance, x0=None, opts: Optional[SolverOptions] = None
) -> ConeProjectionResult:
    """Project z onto the simplicial cone {A x : x >= 0}.

    Solves the associated QP by the Newton iteration (from the origin
    unless x0 is given) and returns the cone coefficients v, the projected
    point A v, and the solve report.  Non-convergence is reported through
    the report's status; v is then the positive part of the last iterate.
    """
    q = cone_instance_to_qp(ci)
    start = np.zeros(ci.n) if x0 is None else as_vector(x0, "x0")
    report = qp_newton_solve(q, start, opts)
    base = report.solution if report.solution is not None else report.last_iterate
    v = np.maximum(base, 0.0)
    return ConeProjectionResult(v=v, projection=ci.A @ v, report=report)


def lcp_residual(q: QpProblem, x, y) -> float:
    """Max violation of y - Qx = b_tilde, x >= 0, y >= 0, <x, y> = 0."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.size != q.n or y.size != q.n:
        raise DimensionError(f"x and y must have length {q.n}")
    return max(
        float(np.abs(y - q.Q @ x - q.b_tilde).max()),
        float(np.abs(np.minimum(x, 0.0)).max()),
        float(np.abs(np.minimum(y, 0.0)).max()),
        float(abs(x @ y)),
    )
