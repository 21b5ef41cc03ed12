"""Bicluster extraction and outlier detection from a solved factorization."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix


@dataclass
class Bicluster:
    factor_index: int
    feature_indices: list = field(default_factory=list)
    sample_indices: list = field(default_factory=list)
    threshold: float = 0.0

    def to_dict(self, feature_names=None, sample_names=None):
        d = {
            "factor_index": self.factor_index,
            "threshold": self.threshold,
            "feature_indices": list(self.feature_indices),
            "sample_indices": list(self.sample_indices),
        }
        if feature_names is not None:
            d["features"] = [feature_names[i] for i in self.feature_indices]
        if sample_names is not None:
            d["samples"] = [sample_names[j] for j in self.sample_indices]
        return d


def extract_biclusters(W, H, T):
    """One bicluster per factor i.

    Features: indices whose z-score within column i of W (population sd)
    exceeds ``T``. Samples: columns of H whose maximum is attained in row
    i; a column with tied maxima joins every maximal factor.
    """
    W = as_matrix(W, "W")
    H = as_matrix(H, "H")
    if W.shape[1] != H.shape[0]:
        raise ValueError(f"W has {W.shape[1]} columns but H has {H.shape[0]} rows")
    if np.isnan(T):
        raise ValueError("threshold T must not be NaN")

    col_max = H.max(axis=0)
    out = []
    for i in range(W.shape[1]):
        w = W[:, i]
        sd = w.std()
        if sd == 0:
            warnings.warn(f"column {i} of W is constant; its feature set is empty", RuntimeWarning, stacklevel=2)
            features = []
        else:
            z = (w - w.mean()) / sd
            features = np.flatnonzero(z > T).tolist()
        samples = np.flatnonzero(H[i] >= col_max).tolist()
        out.append(Bicluster(i, features, samples, float(T)))
    return out


def detect_outliers(H, m):
    """The ``m`` samples whose largest coefficient in H is smallest, ascending."""
    H = as_matrix(H, "H")
    if not 0 <= m <= H.shape[1]:
        raise ValueError(f"m must lie in [0, {H.shape[1]}], got {m}")
    return np.argsort(H.max(axis=0), kind="stable")[:m].tolist()
