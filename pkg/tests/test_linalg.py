import numpy as np
import pytest

from ginibre import linalg


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


class TestDeterminant:
    def test_identity(self):
        assert linalg.lu_det(np.eye(4)) == pytest.approx(1.0)

    def test_matches_numpy(self):
        rng = np.random.default_rng(1)
        for n in (1, 2, 5, 8, 12):
            a = random_complex(rng, n)
            assert linalg.lu_det(a) == pytest.approx(np.linalg.det(a), rel=1e-10)

    def test_singular(self):
        a = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
        assert abs(linalg.lu_det(a)) < 1e-14

    def test_permutation_parity(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        assert linalg.lu_det(a) == pytest.approx(-1.0)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            linalg.lu_factor(np.ones((2, 3)))


class TestSolve:
    def test_residual(self):
        rng = np.random.default_rng(2)
        for n in (2, 6, 20):
            a = random_complex(rng, n)
            b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x = linalg.solve(a, b)
            assert np.linalg.norm(a @ x - b) < 1e-10 * np.linalg.norm(b)

    def test_singular_raises(self):
        a = np.zeros((3, 3), dtype=complex)
        lu, piv, _ = linalg.lu_factor(a)
        with pytest.raises(linalg.SingularMatrixError):
            linalg.lu_solve(lu, piv, np.ones(3, dtype=complex))
