"""Dense complex linear algebra on numpy arrays.

Matrices are 2-D ``complex128`` arrays and vectors 1-D arrays.  The helpers
add shape checking, tolerance-based predicates and a few comparisons used
throughout the package (proportionality up to a scalar, equality up to a
global phase).
"""

from __future__ import annotations

import os

import numpy as np

from .errors import DomainError, ShapeError

DEFAULT_TOL = 1e-10


def default_tol() -> float:
    """Global tolerance; ``MUBKIT_TOL`` in the environment overrides it."""
    env = os.environ.get("MUBKIT_TOL")
    return float(env) if env else DEFAULT_TOL


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or 0 in A.shape:
        raise ShapeError(f"expected a non-empty matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    return A


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ShapeError(f"expected a vector, got shape {v.shape}")
    return v


def _square(A: np.ndarray) -> np.ndarray:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {A.shape}")
    return A


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def matmul(A, B) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def adjoint(A) -> np.ndarray:
    return as_matrix(A).conj().T


def trace(A) -> complex:
    return complex(np.trace(_square(A)))


def tensor(A, B) -> np.ndarray:
    """Kronecker product; row index (a, b) maps to a*rows(B) + b."""
    return np.kron(as_matrix(A), as_matrix(B))


def apply(A, v) -> np.ndarray:
    A, v = as_matrix(A), as_vector(v)
    if A.shape[1] != v.shape[0]:
        raise ShapeError(f"cannot apply {A.shape} to a vector of length {v.shape[0]}")
    return A @ v


def inner(u, v) -> complex:
    """<u|v>, conjugate-linear in the first argument."""
    u, v = as_vector(u), as_vector(v)
    if u.shape != v.shape:
        raise ShapeError(f"vector lengths differ: {u.shape[0]} vs {v.shape[0]}")
    return complex(np.vdot(u, v))


def max_abs(A) -> float:
    return float(np.max(np.abs(A))) if np.size(A) else 0.0


def is_unitary(A, tol: float | None = None) -> bool:
    tol = default_tol() if tol is None else tol
    A = _square(A)
    return max_abs(A.conj().T @ A - np.eye(len(A))) < tol


def is_hermitian(A, tol: float | None = None) -> bool:
    tol = default_tol() if tol is None else tol
    A = _square(A)
    return max_abs(A - A.conj().T) < tol


def eig_hermitian(H, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of H."""
    H = _square(H)
    scale = max(1.0, max_abs(H))
    if not is_hermitian(H, (default_tol() if tol is None else tol) * scale):
        raise DomainError("eig_hermitian needs a Hermitian matrix")
    # symmetrise so tiny anti-Hermitian noise does not leak into eigh
    values, vectors = np.linalg.eigh((H + H.conj().T) / 2)
    return values, vectors


def proportionality(A, B, tol: float | None = None) -> complex | None:
    """Scalar z with A == z*B to within tol, or None.

    The scalar is read off the largest entry of B and then checked against
    every entry.
    """
    tol = default_tol() if tol is None else tol
    A, B = np.asarray(A, dtype=complex), np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise ShapeError(f"shapes differ: {A.shape} vs {B.shape}")
    idx = np.unravel_index(np.argmax(np.abs(B)), B.shape)
    if abs(B[idx]) < tol:
        return None
    z = A[idx] / B[idx]
    return complex(z) if max_abs(A - z * B) < tol else None


def phase_distance(u, v) -> float:
    """1 - |<u|v>| for unit vectors; zero iff equal up to a global phase."""
    # rounding can push |<u|v>| a hair above 1
    return max(0.0, 1.0 - abs(inner(u, v)))


def normalize_phase(v, tol: float = 1e-12) -> np.ndarray:
    """Rotate v so its first non-negligible component is real and positive."""
    v = as_vector(v)
    nz = np.flatnonzero(np.abs(v) > tol)
    if not len(nz):
        return v.copy()
    lead = v[nz[0]]
    return v * (abs(lead) / lead)


def commutator_norm(A, B) -> float:
    A, B = as_matrix(A), as_matrix(B)
    return max_abs(A @ B - B @ A)


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def array_to_json(A) -> list:
    """Nested lists with every complex entry as [re, im]."""
    A = np.asarray(A, dtype=complex)
    return np.stack([A.real, A.imag], axis=-1).tolist()


def array_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ShapeError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
