"""Exact projections onto the nonnegative sparse constraint sets.

All top-k selections use a stable sort on descending scores, so ties keep
the lower index. Entrywise selection flattens in column-major order.
"""

import numpy as np

from .linalg import as_matrix


def _check_k(k):
    if k < 0:
        raise ValueError(f"sparsity level must be nonnegative, got {k}")
    return int(k)


def _top_k(scores, k):
    """Indices of the ``k`` largest scores, largest first, ties to lower index."""
    return np.argsort(-scores, kind="stable")[: min(k, scores.size)]


def project_nonneg(M):
    return np.maximum(as_matrix(M), 0.0)


def support_norm(M, k):
    """Row indices of the ``k`` rows of ``M`` with the largest l2 norms.

    Returned in selection order (largest norm first). When ``k`` is at
    least the number of rows, every row index is returned.
    """
    A = as_matrix(M)
    k = _check_k(k)
    return _top_k(np.linalg.norm(A, axis=1), k)


def row_sparse_project(M, k):
    """Keep the ``k`` rows of largest l2 norm verbatim and zero the rest."""
    A = as_matrix(M)
    out = np.zeros_like(A)
    keep = support_norm(A, k)
    out[keep] = A[keep]
    return out


def prox_row_sparse_nonneg(M, k):
    """Nearest point of ``{W >= 0, ||W||_{2,0} <= k}`` to ``M``.

    Clamps negatives first, then keeps the ``k`` heaviest rows of the
    clamped matrix.
    """
    return row_sparse_project(project_nonneg(M), k)


def prox_col_sparse_nonneg(M, k):
    """Nearest point of ``{W >= 0, ||w_j||_0 <= k for every column j}``."""
    P = project_nonneg(M)
    k = _check_k(k)
    if k >= P.shape[0]:
        return P
    out = np.zeros_like(P)
    # stable descending order within each column
    order = np.argsort(-P, axis=0, kind="stable")[:k]
    cols = np.broadcast_to(np.arange(P.shape[1]), order.shape)
    out[order, cols] = P[order, cols]
    return out


def prox_entry_sparse_nonneg(M, budget):
    """Nearest point of ``{W >= 0, ||W||_0 <= budget}`` to ``M``."""
    P = project_nonneg(M)
    budget = _check_k(budget)
    if budget >= P.size:
        return P
    flat = P.ravel(order="F")
    keep = _top_k(flat, budget)
    out = np.zeros_like(flat)
    out[keep] = flat[keep]
    return out.reshape(P.shape, order="F")
