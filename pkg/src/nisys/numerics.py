"""Dense matrix kernels shared by the rest of the package.

Thin wrappers over numpy/scipy LAPACK drivers that pin down the contracts the
other modules rely on: inputs are validated as finite, near-symmetric inputs
are symmetrized before a symmetric decomposition, and ill-conditioned solves
raise instead of returning garbage.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

COND_LIMIT = 1e12


class NumericsError(ValueError):
    pass


def as_matrix(A, square: bool = False, name: str = "matrix") -> np.ndarray:
    M = np.atleast_2d(np.asarray(A))
    if M.ndim != 2:
        raise NumericsError(f"{name} must be 2-dimensional, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericsError(f"{name} contains NaN or Inf entries")
    if square and M.shape[0] != M.shape[1]:
        raise NumericsError(f"{name} must be square, got shape {M.shape}")
    return M


def eig_general(A) -> np.ndarray:
    """Eigenvalues of a square real (or complex) matrix, unordered."""
    A = as_matrix(A, square=True, name="A")
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    return np.linalg.eigvals(A)


def eig_symmetric(S, vectors: bool = False, sym_tol: float = 1e-8):
    """Ascending eigenvalues of a symmetric/Hermitian matrix.

    The input is symmetrized before decomposition; asymmetry beyond
    sym_tol * ||S|| is an error rather than a silent fix.
    """
    S = as_matrix(S, square=True, name="S")
    if S.shape[0] == 0:
        return (np.zeros(0), np.zeros((0, 0))) if vectors else np.zeros(0)
    nrm = np.linalg.norm(S)
    if np.linalg.norm(S - S.conj().T) > sym_tol * max(1.0, nrm):
        raise NumericsError("input is not symmetric/Hermitian within tolerance")
    H = 0.5 * (S + S.conj().T)
    if vectors:
        w, V = np.linalg.eigh(H)
        return w, V
    return np.linalg.eigvalsh(H)


def solve(A, B) -> np.ndarray:
    """X with AX = B. Rejects condition estimates beyond COND_LIMIT."""
    A = as_matrix(A, square=True, name="A")
    B = np.asarray(B)
    if A.shape[0] == 0:
        return np.zeros_like(B)
    c = np.linalg.cond(A)
    if not np.isfinite(c) or c > COND_LIMIT:
        raise NumericsError(f"matrix is singular or ill-conditioned (cond ~ {c:.2e})")
    return np.linalg.solve(A, B)


def inverse(A) -> np.ndarray:
    A = as_matrix(A, square=True, name="A")
    return solve(A, np.eye(A.shape[0], dtype=A.dtype))


def sigma_max(A) -> float:
    A = as_matrix(A, name="A")
    if A.size == 0:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[0])


def balance(A):
    """Diagonal similarity scaling (Ab, T) with Ab = inv(T) A T, T diagonal."""
    A = as_matrix(A, square=True, name="A")
    if A.shape[0] == 0:
        return A.copy(), np.eye(0)
    Ab, T = sla.matrix_balance(A, permute=False)
    return Ab, T


def generalized_eigenvalues(M1, M2) -> np.ndarray:
    """Finite generalized eigenvalues of the pencil (M1, M2)."""
    M1 = as_matrix(M1, square=True, name="M1")
    M2 = as_matrix(M2, square=True, name="M2")
    ev = sla.eig(M1, M2, right=False)
    return ev[np.isfinite(ev)]
