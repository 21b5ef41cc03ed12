"""Norms and spectral primitives on dense real matrices.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype float64.
"""

import warnings

import numpy as np


class PowerIterationWarning(RuntimeWarning):
    """Power iteration hit ``max_iter`` before meeting its tolerance."""


def as_matrix(M, name="M"):
    """Return ``M`` as a finite 2-D float64 array, raising ValueError otherwise."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf")
    return A


def frobenius_norm(M):
    A = as_matrix(M)
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if scale == 0.0:
        return 0.0
    return scale * float(np.sqrt(np.sum(np.square(A / scale))))


def spectral_norm(M, tol=1e-9, max_iter=1000):
    """Largest singular value of ``M`` by power iteration.

    Iterates on the Gram matrix of the smaller side (``M.T @ M`` or
    ``M @ M.T``) from the normalized all-ones vector, so repeated calls on
    the same input return the same value. Iteration stops once the relative
    change of the eigenvalue estimate drops below ``tol``. If ``max_iter``
    is reached first a :class:`PowerIterationWarning` is issued and the last
    estimate is returned.
    """
    A = as_matrix(M)
    if A.size == 0:
        raise ValueError("spectral_norm of an empty matrix")
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = float(np.max(np.abs(A)))
    if scale == 0.0:
        return 0.0
    # work on M / max|M| so the Gram matrix neither overflows nor underflows
    A = A / scale
    G = A.T @ A if A.shape[1] <= A.shape[0] else A @ A.T
    d = G.shape[0]

    v = np.full(d, 1.0 / np.sqrt(d))
    w = G @ v
    if not np.any(w):
        # all-ones lies in the null space; restart on the heaviest coordinate
        diag = np.diag(G)
        if not np.any(diag):
            return 0.0
        v = np.zeros(d)
        v[int(np.argmax(diag))] = 1.0
        w = G @ v

    lam = float(v @ w)
    for _ in range(max_iter):
        v = w / np.linalg.norm(w)
        w = G @ v
        lam_new = float(v @ w)
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return scale * float(np.sqrt(max(lam_new, 0.0)))
        lam = lam_new
    warnings.warn(
        f"power iteration did not reach tol={tol:g} in {max_iter} iterations",
        PowerIterationWarning,
        stacklevel=2,
    )
    return scale * float(np.sqrt(max(lam, 0.0)))


def l0_norm(M):
    """Number of nonzero entries (exact zero test)."""
    return int(np.count_nonzero(np.asarray(M)))


def l20_norm(M):
    """Number of rows with at least one nonzero entry."""
    return int(np.count_nonzero(np.any(np.asarray(M) != 0, axis=1)))
