"""Structured sparse non-negative matrix factorization.

Row-sparse (l2,0), column-sparse (lc,0) and entrywise-sparse (l0) NMF and
their orthogonal variants, solved with PALM and monotone accelerated PALM.
"""

from .linalg import frobenius_norm, spectral_norm, l0_norm, l20_norm
from .prox import (
    project_nonneg,
    support_norm,
    row_sparse_project,
    prox_row_sparse_nonneg,
    prox_col_sparse_nonneg,
    prox_entry_sparse_nonneg,
)
from .objective import objective_value, grad_H, grad_W, lipschitz_H, lipschitz_W
from .solver import (
    Variant,
    Init,
    Termination,
    ModelSpec,
    SolverConfig,
    FactorPair,
    SolverReport,
    init_factors,
    prox_variant,
    palm_solve,
    mapalm_solve,
    continuation_solve,
    fit,
)
from .metrics import assign_clusters, nmi, purity, entropy_metric, orthogonality_score
from .data import (
    LabeledDataset,
    synthetic_three_block,
    synthetic_outlier,
    load_matrix,
    save_matrix,
    load_labels,
    save_labels,
    preprocess_scrna,
)
from .analysis import Bicluster, extract_biclusters, detect_outliers

__version__ = "0.1.0"
