import math

import numpy as np
import pytest

from aderdec.linalg import (
    SingularMatrixError,
    condition_1norm,
    invert,
    lu_factor,
    lu_solve,
)

SQRT3 = math.sqrt(3.0)
EXAMPLE_MASS = np.array([[1.0, (SQRT3 - 1) / 2], [-(SQRT3 + 1) / 2, 1.0]])


class TestLUFactor:
    def test_identity_needs_no_pivoting(self):
        f = lu_factor(np.eye(3))
        assert np.allclose(f.lu, np.eye(3))
        assert f.sign == 1

    def test_forced_swap_changes_sign(self):
        f = lu_factor(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert f.sign == -1

    def test_example_mass_matrix_determinant(self):
        f = lu_factor(EXAMPLE_MASS)
        det = f.sign * np.prod(np.diag(f.lu))
        assert det == pytest.approx(1.5, abs=1e-14)

    def test_singular_matrix_reports_pivot_index(self):
        with pytest.raises(SingularMatrixError) as err:
            lu_factor(np.array([[1.0, 2.0], [2.0, 4.0]]))
        assert err.value.pivot_index == 1

    def test_rejects_nonsquare_and_nonfinite(self):
        with pytest.raises(ValueError):
            lu_factor(np.ones((2, 3)))
        with pytest.raises(ValueError):
            lu_factor(np.array([[1.0, np.nan], [0.0, 1.0]]))


class TestLUSolve:
    def test_identity(self):
        f = lu_factor(np.eye(4))
        b = np.arange(4.0)
        assert np.allclose(lu_solve(f, b), b)

    def test_example_mass_matrix_solve(self):
        f = lu_factor(EXAMPLE_MASS)
        x = lu_solve(f, np.array([1.0, 0.0]))
        assert x == pytest.approx([2 / 3, (SQRT3 + 1) / 3], abs=1e-14)

    def test_multiple_rhs_matches_columnwise(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(5, 5)) + 5 * np.eye(5)
        b = rng.normal(size=(5, 3))
        f = lu_factor(a)
        block = lu_solve(f, b)
        for j in range(3):
            assert np.allclose(block[:, j], lu_solve(f, b[:, j]))

    def test_dimension_mismatch(self):
        f = lu_factor(np.eye(3))
        with pytest.raises(ValueError):
            lu_solve(f, np.ones(4))

    def test_residual_bound(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(8, 8)) + 8 * np.eye(8)
        b = rng.normal(size=8)
        x = lu_solve(lu_factor(a), b)
        resid = np.linalg.norm(a @ x - b)
        bound = 1e-10 * (np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(b))
        assert resid <= bound


class TestInvert:
    def test_lobatto2_ader_mass_matrix(self):
        m = np.array([[0.5, 0.5], [-0.5, 0.5]])
        assert np.allclose(invert(m), [[1.0, -1.0], [1.0, 1.0]], atol=1e-14)

    def test_identity_and_diagonal(self):
        assert np.allclose(invert(np.eye(3)), np.eye(3))
        assert np.allclose(invert(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))

    def test_singular_raises(self):
        with pytest.raises(SingularMatrixError):
            invert(np.zeros((2, 2)))

    def test_roundtrip_on_random_matrices(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            a = rng.normal(size=(10, 10)) + 10 * np.eye(10)
            assert np.allclose(invert(invert(a)), a, atol=1e-8)

    def test_solve_invert_consistency(self):
        rng = np.random.default_rng(13)
        a = rng.normal(size=(6, 6)) + 6 * np.eye(6)
        b = rng.normal(size=6)
        assert np.allclose(lu_solve(lu_factor(a), b), invert(a) @ b, atol=1e-10)


def test_condition_estimate():
    assert condition_1norm(np.eye(4)) == pytest.approx(1.0)
    assert condition_1norm(np.diag([1.0, 1e-6])) == pytest.approx(1e6, rel=1e-10)
    assert condition_1norm(np.zeros((2, 2))) == np.inf
