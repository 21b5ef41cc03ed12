"""From a raw count matrix on disk to biclusters.

Writes a small toy count matrix, loads it, filters genes that are mostly
zero, log-transforms, fits ONMF_l20 and extracts biclusters with the
z-score threshold T. The same steps are available from the shell:

    ssnmf solve --dataset counts.csv --model onmf-l20 --k 30 --rank 3 --out run
    ssnmf biclusters --W run/restart_00/W.csv --H run/restart_00/H.csv --threshold-T 1.5 --out bic.json

    python3 demos/05_scrna_biclusters.py
"""

import tempfile
from pathlib import Path

import numpy as np

from ssnmf import (
    ModelSpec,
    SolverConfig,
    Variant,
    extract_biclusters,
    fit,
    load_matrix,
    preprocess_scrna,
    save_matrix,
)

rng = np.random.default_rng(0)
genes, cells = 200, 45
counts = rng.poisson(0.3, (genes, cells)).astype(float)
for t in range(3):  # three cell types, each marked by 15 genes
    counts[t * 15:(t + 1) * 15, t * 15:(t + 1) * 15] += rng.poisson(6, (15, 15))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "counts.csv"
    save_matrix(path, counts, [f"gene{i}" for i in range(genes)], [f"cell{j}" for j in range(cells)], corner="gene")
    ds = load_matrix(path)

clean = preprocess_scrna(ds, dropout_fraction=0.7)
print(f"kept {clean.X.shape[0]} of {genes} genes after the dropout filter")

pair, _ = fit(clean.X, ModelSpec(Variant.ONMF_L20, rank=3, k=30), SolverConfig(seed=0))
for b in extract_biclusters(pair.W, pair.H, T=1.5):
    d = b.to_dict(clean.feature_names, clean.sample_names)
    print(f"factor {b.factor_index}: {len(d['features'])} genes {d['features'][:5]}..., "
          f"{len(d['samples'])} cells {d['samples'][:5]}...")
