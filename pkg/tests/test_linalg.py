import math

import numpy as np
import pytest

from pwlnewton import (
    AsymmetricMatrixError,
    DimensionError,
    IterationLimitError,
    SingularMatrixError,
    inv_spectral_norm,
    lu_factor,
    lu_inverse,
    lu_solve,
    spectral_norm,
    sym_eig,
)


def sigma_max_2x2(m):
    """Closed-form largest singular value of a 2x2 matrix."""
    g = np.asarray(m, float).T @ np.asarray(m, float)
    tr = g[0, 0] + g[1, 1]
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    return math.sqrt((tr + math.sqrt(tr * tr - 4.0 * det)) / 2.0)


# ---------------------------------------------------------------- LU


def test_lu_identity():
    f = lu_factor(np.eye(3))
    assert not f.singular
    assert np.array_equal(f.permutation, [0, 1, 2])
    assert np.array_equal(f.lu, np.eye(3))


def test_lu_row_swap_not_singular():
    f = lu_factor([[0.0, 1.0], [1.0, 0.0]])
    assert not f.singular
    assert not np.array_equal(f.permutation, [0, 1])
    assert sorted(f.permutation) == [0, 1]


def test_lu_singular_flag_on_zero_pivot():
    # diag(0, 2) arises as diag(1,1) + diag(-1,1): an exactly singular pattern
    f = lu_factor(np.diag([0.0, 2.0]))
    assert f.singular
    with pytest.raises(SingularMatrixError):
        lu_solve(f, [1.0, 1.0])


def test_lu_zero_matrix_is_singular():
    assert lu_factor(np.zeros((3, 3))).singular


def test_lu_solve_identity():
    f = lu_factor(np.eye(2))
    assert np.array_equal(lu_solve(f, [5.0, -2.0]), [5.0, -2.0])


def test_lu_solve_2x2_closed_form():
    # verified by substitution: [[-1,3],[-1,1]] @ [2,-1] = [-5,-3]
    x = lu_solve(lu_factor([[-1.0, 3.0], [-1.0, 1.0]]), [-5.0, -3.0])
    np.testing.assert_allclose(x, [2.0, -1.0], rtol=0, atol=1e-14)


def test_lu_solve_residual_random():
    rng = np.random.default_rng(42)
    for _ in range(20):
        m = rng.standard_normal((8, 8)) + 4.0 * np.eye(8)
        rhs = rng.standard_normal(8)
        x = lu_solve(lu_factor(m), rhs)
        assert np.abs(m @ x - rhs).max() <= 1e-10 * (1.0 + np.abs(rhs).max())


def test_lu_solve_residual_graded_conditioning():
    # planted solutions across condition numbers up to 1e6
    rng = np.random.default_rng(43)
    for exponent in (2, 4, 6):
        u, _ = np.linalg.qr(rng.standard_normal((10, 10)))
        v, _ = np.linalg.qr(rng.standard_normal((10, 10)))
        m = (u * np.logspace(0, -exponent, 10)[np.newaxis, :]) @ v.T
        x_true = rng.standard_normal(10)
        rhs = m @ x_true
        x = lu_solve(lu_factor(m), rhs)
        assert np.abs(m @ x - rhs).max() <= 1e-10 * (1.0 + np.abs(rhs).max())


def test_lu_solve_transpose():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((6, 6)) + 3.0 * np.eye(6)
    rhs = rng.standard_normal(6)
    x = lu_solve(lu_factor(m), rhs, trans=1)
    np.testing.assert_allclose(m.T @ x, rhs, atol=1e-12)


def test_lu_permutation_is_bijection():
    rng = np.random.default_rng(11)
    for _ in range(10):
        f = lu_factor(rng.standard_normal((7, 7)))
        assert sorted(f.permutation) == list(range(7))


def test_lu_rejects_non_square():
    with pytest.raises(DimensionError):
        lu_factor(np.ones((2, 3)))


def test_lu_rejects_nan():
    with pytest.raises(ValueError):
        lu_factor([[np.nan, 0.0], [0.0, 1.0]])


def test_lu_solve_rejects_wrong_length():
    f = lu_factor(np.eye(3))
    with pytest.raises(DimensionError):
        lu_solve(f, [1.0, 2.0])


def test_lu_inverse():
    m = np.array([[2.0, 1.0], [1.0, 3.0]])
    np.testing.assert_allclose(lu_inverse(lu_factor(m)) @ m, np.eye(2), atol=1e-14)


# ------------------------------------------------------- spectral norm


def test_spectral_norm_diagonal():
    assert spectral_norm(np.diag([3.0, -7.0, 2.0])) == pytest.approx(7.0, rel=1e-8)
    assert spectral_norm([[2.0, 0.0], [0.0, 0.5]]) == pytest.approx(2.0, rel=1e-8)


def test_spectral_norm_2x2_closed_form():
    m = [[1.0, -3.0], [1.0, -2.0]]
    value = spectral_norm(m)
    assert value == pytest.approx(sigma_max_2x2(m), rel=1e-8)
    assert abs(value - 3.8644) <= 1e-3


def test_spectral_norm_zero_matrix():
    assert spectral_norm(np.zeros((4, 4))) == 0.0


def test_spectral_norm_transpose_and_scaling_invariants():
    rng = np.random.default_rng(7)
    for _ in range(10):
        m = rng.standard_normal((6, 6))
        s = spectral_norm(m)
        assert spectral_norm(m.T) == pytest.approx(s, rel=1e-6)
        assert spectral_norm(-2.5 * m) == pytest.approx(2.5 * s, rel=1e-6)


def test_spectral_norm_rejects_bad_tol():
    with pytest.raises(ValueError):
        spectral_norm(np.eye(2), tol=0.0)


def test_spectral_norm_iteration_limit():
    with pytest.raises(IterationLimitError):
        spectral_norm(np.random.default_rng(0).standard_normal((5, 5)), max_iter=1)


# --------------------------------------------------- inverse spectral norm


def test_inv_spectral_norm_diagonal():
    assert inv_spectral_norm(3.0 * np.eye(4)) == pytest.approx(1.0 / 3.0, rel=1e-8)
    assert inv_spectral_norm(np.diag([-1.0, 1.0])) == pytest.approx(1.0, rel=1e-8)


def test_inv_spectral_norm_2x2():
    t = np.array([[-2.0, 3.0], [-1.0, 1.0]])
    t_inv = np.array([[1.0, -3.0], [1.0, -2.0]])  # det(T) = 1
    value = inv_spectral_norm(t)
    assert value == pytest.approx(sigma_max_2x2(t_inv), rel=1e-8)
    assert abs(value - 3.8644) <= 1e-3


def test_inv_spectral_norm_singular():
    with pytest.raises(SingularMatrixError):
        inv_spectral_norm(np.diag([0.0, 1.0]))


def test_inv_spectral_norm_matches_smallest_singular_value():
    rng = np.random.default_rng(15)
    for n in (3, 8, 20):
        m = rng.standard_normal((n, n)) + 2.0 * np.eye(n)
        eigenvalues, _ = sym_eig(m.T @ m)
        sigma_min = math.sqrt(eigenvalues[-1])
        assert inv_spectral_norm(m) * sigma_min == pytest.approx(1.0, rel=1e-6)


# ------------------------------------------------------------ sym_eig


def test_sym_eig_identity():
    eigenvalues, w = sym_eig(np.eye(3))
    np.testing.assert_allclose(eigenvalues, [1.0, 1.0, 1.0])
    np.testing.assert_allclose(np.abs(w @ w.T), np.eye(3), atol=1e-12)


def test_sym_eig_diagonal_sorted_descending():
    eigenvalues, w = sym_eig(np.diag([4.0, 1.0]))
    np.testing.assert_allclose(eigenvalues, [4.0, 1.0])
    # eigenvectors are the coordinate axes up to sign
    np.testing.assert_allclose(np.abs(w), np.eye(2), atol=1e-12)


def test_sym_eig_reconstruction():
    rng = np.random.default_rng(23)
    b = rng.standard_normal((10, 10))
    s = b.T @ b
    eigenvalues, w = sym_eig(s)
    assert np.all(np.diff(eigenvalues) <= 0)
    reconstruction = (w * eigenvalues[np.newaxis, :]) @ w.T
    assert np.abs(reconstruction - s).max() <= 1e-8 * np.abs(s).max()
    assert np.abs(w.T @ w - np.eye(10)).max() <= 1e-9


def test_sym_eig_rejects_asymmetric():
    with pytest.raises(AsymmetricMatrixError):
        sym_eig([[1.0, 2.0], [0.0, 1.0]])


def test_sym_eig_accepts_roundoff_asymmetry():
    s = np.array([[2.0, 1.0], [1.0 + 1e-15, 2.0]])
    eigenvalues, _ = sym_eig(s)
    np.testing.assert_allclose(eigenvalues, [3.0, 1.0], rtol=1e-12)
