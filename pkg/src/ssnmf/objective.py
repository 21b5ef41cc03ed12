"""Penalized factorization objective and its block derivatives.

    F(W, H) = 1/2 ||X - W H||_F^2 + rho/2 * sum_j ((1^T h_j)^2 - ||h_j||^2)

The penalty vanishes exactly when every column of a nonnegative H has at
most one nonzero entry.
"""

import numpy as np

from .linalg import spectral_norm

# floor for step constants; keeps 1/L finite when a factor is all zero
MIN_LIPSCHITZ = 1e-12


def _check_shapes(X, W, H):
    p, n = X.shape
    if W.ndim != 2 or H.ndim != 2 or W.shape[0] != p or H.shape[1] != n or W.shape[1] != H.shape[0]:
        raise ValueError(
            f"shape mismatch: X {X.shape}, W {W.shape}, H {H.shape}"
        )


def _check_rho(rho):
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho}")


def orthogonality_penalty(H):
    """sum_j ((1^T h_j)^2 - ||h_j||^2), without the rho/2 factor."""
    return float(np.sum(np.sum(H, axis=0) ** 2) - np.sum(H * H))


def objective_value(X, W, H, rho=0.0):
    X, W, H = np.asarray(X, float), np.asarray(W, float), np.asarray(H, float)
    _check_shapes(X, W, H)
    _check_rho(rho)
    R = X - W @ H
    val = 0.5 * float(np.sum(R * R))
    if rho:
        val += 0.5 * rho * orthogonality_penalty(H)
    return val


def grad_H(X, W, H, rho=0.0):
    """W^T W H - W^T X + rho * (1 1^T H - H).

    ``1 1^T H`` is the column sums of H broadcast down each column.
    """
    X, W, H = np.asarray(X, float), np.asarray(W, float), np.asarray(H, float)
    _check_shapes(X, W, H)
    _check_rho(rho)
    G = (W.T @ W) @ H - W.T @ X
    if rho:
        G += rho * (np.sum(H, axis=0, keepdims=True) - H)
    return G


def grad_W(X, W, H):
    X, W, H = np.asarray(X, float), np.asarray(W, float), np.asarray(H, float)
    _check_shapes(X, W, H)
    return W @ (H @ H.T) - X @ H.T


def lipschitz_H(W, rho=0.0):
    """Spectral norm of W^T W + rho * (ones(r, r) - I_r)."""
    W = np.asarray(W, float)
    _check_rho(rho)
    r = W.shape[1]
    A = W.T @ W + rho * (np.ones((r, r)) - np.eye(r))
    return spectral_norm(A)


def lipschitz_W(H):
    """Spectral norm of H H^T."""
    H = np.asarray(H, float)
    return spectral_norm(H @ H.T)


def step_constant(L):
    """Lipschitz constant floored at ``MIN_LIPSCHITZ``."""
    return max(L, MIN_LIPSCHITZ)
