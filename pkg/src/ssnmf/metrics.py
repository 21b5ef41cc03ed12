"""Clustering agreement metrics and label extraction from H."""

import numpy as np

from .linalg import as_matrix


def assign_clusters(H):
    """Row index of the largest entry in each column (ties to the lowest row)."""
    H = as_matrix(H, "H")
    if H.size == 0:
        raise ValueError("H is empty")
    return np.argmax(H, axis=0)


def contingency(pred, truth):
    """Overlap counts t[l, h] between predicted clusters and true classes.

    Labels are relabeled to 0..c-1 and 0..d-1 in sorted order first.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"label length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ValueError("empty label vectors")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    return table


def nmi(pred, truth):
    """Normalized mutual information, geometric-mean normalization.

    If either partition has zero entropy, returns 1 when the partitions
    coincide and 0 otherwise.
    """
    T = contingency(pred, truth).astype(float)
    n = T.sum()
    rows = T.sum(axis=1)
    cols = T.sum(axis=0)
    nz = T > 0
    mi = np.sum(T[nz] * np.log(n * T[nz] / np.outer(rows, cols)[nz]))
    h_pred = -np.sum(rows * np.log(rows / n))
    h_truth = -np.sum(cols * np.log(cols / n))
    if h_pred <= 0 or h_truth <= 0:
        return 1.0 if T.shape == (1, 1) else 0.0
    return float(min(max(mi / np.sqrt(h_pred * h_truth), 0.0), 1.0))


def purity(pred, truth):
    T = contingency(pred, truth)
    return float(T.max(axis=1).sum() / T.sum())


def entropy_metric(pred, truth):
    """Size-weighted class entropy of the predicted clusters, in [0, 1].

    Normalized by log2 of the number of true classes, which must be >= 2.
    """
    T = contingency(pred, truth).astype(float)
    d = T.shape[1]
    if d < 2:
        raise ValueError("entropy needs at least two true classes")
    n = T.sum()
    rows = T.sum(axis=1, keepdims=True)
    nz = T > 0
    s = np.sum(T[nz] * np.log2((T / rows)[nz]))
    return float(-s / (n * np.log2(d))) + 0.0


def orthogonality_score(H):
    """||Hn Hn^T - I||_F with Hn the row-normalized H; zero rows are dropped."""
    H = as_matrix(H, "H")
    norms = np.linalg.norm(H, axis=1)
    Hn = H[norms > 0] / norms[norms > 0, None]
    G = Hn @ Hn.T
    return float(np.linalg.norm(G - np.eye(G.shape[0])))
