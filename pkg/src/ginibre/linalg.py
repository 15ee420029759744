"""Dense complex LU factorization with partial pivoting.

Small self-contained kernel shared by the Janossy-density oracles
(determinants of k x k matrices, k <= 12) and the inverse-iteration
eigenvector recovery used for eigensolver backward-error checks.
"""

from __future__ import annotations

import numpy as np

__all__ = ["lu_factor", "lu_solve", "lu_det", "det"]


class SingularMatrixError(np.linalg.LinAlgError):
    pass


def lu_factor(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Factor PA = LU in place on a copy; returns (lu, piv, parity)."""
    lu = np.array(a, dtype=complex, copy=True)
    n = lu.shape[0]
    if lu.shape != (n, n):
        raise ValueError(f"square matrix required, got shape {lu.shape}")
    piv = np.arange(n)
    parity = 1
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
            parity = -parity
        pivot = lu[k, k]
        if pivot == 0.0:
            continue  # singular; determinant will be zero
        if k + 1 < n:
            lu[k + 1 :, k] /= pivot
            lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, piv, parity


def lu_det(a: np.ndarray) -> complex:
    """Determinant via LU; exact zero for numerically singular pivots."""
    lu, _, parity = lu_factor(a)
    return parity * complex(np.prod(np.diagonal(lu)))


det = lu_det


def lu_solve(lu: np.ndarray, piv: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b given lu_factor output."""
    n = lu.shape[0]
    x = np.asarray(b, dtype=complex)[piv].copy()
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        pivot = lu[k, k]
        if pivot == 0.0:
            raise SingularMatrixError("zero pivot in back substitution")
        x[k] = (x[k] - lu[k, k + 1 :] @ x[k + 1 :]) / pivot
    return x


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    lu, piv, _ = lu_factor(a)
    return lu_solve(lu, piv, b)
