"""Synthetic datasets, expression-matrix files and scRNA-seq preprocessing.

Matrix files hold features as rows and samples as columns. CSV/TSV files
may carry a header row of sample names and a first column of feature
names; both are detected automatically.
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

P_FEATURES = 500
N_SAMPLES = 60
BACKGROUND_SCALE = 0.9


class MatrixFormatError(ValueError):
    """A matrix or label file could not be parsed or holds invalid values."""


@dataclass
class LabeledDataset:
    X: np.ndarray
    truth: np.ndarray | None = None
    feature_names: list | None = None
    sample_names: list | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim != 2:
            raise ValueError("X must be 2-D")
        if not np.all(np.isfinite(self.X)) or np.any(self.X < 0):
            raise ValueError("X must be finite and nonnegative")
        p, n = self.X.shape
        if self.truth is not None:
            self.truth = np.asarray(self.truth)
            if self.truth.shape != (n,):
                raise ValueError(f"{self.truth.size} labels for {n} samples")
        if self.feature_names is not None and len(self.feature_names) != p:
            raise ValueError("feature_names length differs from row count")
        if self.sample_names is not None and len(self.sample_names) != n:
            raise ValueError("sample_names length differs from column count")


def _normal_matrix(rng, p, n):
    # drawn sample by sample, i.e. column-major fill of the p x n matrix
    return rng.standard_normal((n, p)).T


def _block_dataset(seed, blocks, truth):
    rng = np.random.default_rng(seed)
    X = BACKGROUND_SCALE * _normal_matrix(rng, P_FEATURES, N_SAMPLES)
    for rows, cols in blocks:
        # rescale the same draws so every entry consumes one variate
        X[rows, cols] /= BACKGROUND_SCALE
    return LabeledDataset(np.abs(X), np.asarray(truth))


def synthetic_three_block(seed=0):
    """500 x 60 data with three 60-row signal blocks over 20-sample classes.

    Signal entries are |N(0, 1)| at rows 0-59 x cols 0-19, rows 30-89 x
    cols 20-39 and rows 60-119 x cols 40-59; everything else is
    |0.9 N(0, 1)|. Normals come from ``numpy.random.default_rng(seed)``
    filled column by column.
    """
    blocks = [
        (slice(0, 60), slice(0, 20)),
        (slice(30, 90), slice(20, 40)),
        (slice(60, 120), slice(40, 60)),
    ]
    return _block_dataset(seed, blocks, [0] * 20 + [1] * 20 + [2] * 20)


def synthetic_outlier(seed=0):
    """Like :func:`synthetic_three_block` without the third block.

    Columns 40-59 hold background noise only and carry label 2.
    """
    blocks = [
        (slice(0, 60), slice(0, 20)),
        (slice(30, 90), slice(20, 40)),
    ]
    return _block_dataset(seed, blocks, [0] * 20 + [1] * 20 + [2] * 20)


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def _read_delimited(path, delimiter):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter)]
    # drop blank trailing lines
    while rows and not any(c.strip() for c in rows[-1]):
        rows.pop()
    if not rows:
        raise MatrixFormatError(f"{path}: empty file")

    # header: a non-numeric cell past column 0, or a non-numeric first cell
    # above a numeric one
    first = rows[0]
    is_header = not all(_is_number(c) for c in first[1:]) or (
        len(rows) > 1 and bool(first) and bool(rows[1]) and not _is_number(first[0]) and _is_number(rows[1][0])
    )
    header = first if is_header else None
    first_data = int(header is not None)
    body = rows[first_data:]
    if not body:
        raise MatrixFormatError(f"{path}: no data rows")
    has_names = any(not _is_number(r[0]) for r in body if r)

    width = len(body[0])
    values, names = [], []
    for i, row in enumerate(body):
        lineno = first_data + i + 1
        if len(row) != width:
            raise MatrixFormatError(f"{path}: line {lineno} has {len(row)} fields, expected {width}")
        cells = row[1:] if has_names else row
        if has_names:
            names.append(row[0])
        vals = []
        for j, cell in enumerate(cells):
            col = j + 1 + int(has_names)
            try:
                v = float(cell)
            except ValueError:
                raise MatrixFormatError(f"{path}: line {lineno}, column {col}: cannot parse {cell!r}") from None
            if not math.isfinite(v):
                raise MatrixFormatError(f"{path}: line {lineno}, column {col}: non-finite value {cell!r}")
            if v < 0:
                raise MatrixFormatError(f"{path}: line {lineno}, column {col}: negative value {cell!r}")
            vals.append(v)
        values.append(vals)

    X = np.array(values, dtype=np.float64)
    sample_names = None
    if header is not None:
        sample_names = header[1:] if has_names and len(header) == width else header
        if len(sample_names) != X.shape[1]:
            raise MatrixFormatError(f"{path}: header has {len(sample_names)} sample names for {X.shape[1]} columns")
    return LabeledDataset(X, None, names if has_names else None, list(sample_names) if sample_names is not None else None)


def _read_matrix_market(path):
    try:
        M = scipy.io.mmread(path)
    except Exception as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
    X = M.toarray() if scipy.sparse.issparse(M) else np.asarray(M)
    X = np.asarray(X, dtype=np.float64)
    bad = np.argwhere(~np.isfinite(X) | (X < 0))
    if bad.size:
        i, j = bad[0]
        raise MatrixFormatError(f"{path}: invalid value {X[i, j]!r} at row {i + 1}, column {j + 1}")
    return LabeledDataset(X)


def load_labels(path):
    """One label per line, in sample order. Returned as strings."""
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def save_labels(path, labels):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for lab in labels:
            fh.write(f"{lab}\n")


def encode_labels(labels):
    """Map arbitrary labels to contiguous ints 0..c-1 (sorted order)."""
    _, codes = np.unique(np.asarray(labels), return_inverse=True)
    return codes


def load_matrix(path, format=None, labels=None):
    """Read a matrix file into a :class:`LabeledDataset`.

    ``format`` is ``"csv"``, ``"tsv"`` or ``"mtx"``; when omitted it is
    taken from the file extension. ``labels`` optionally names a sidecar
    file with one label per sample.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt in ("csv",):
        ds = _read_delimited(path, ",")
    elif fmt in ("tsv", "tab", "txt"):
        ds = _read_delimited(path, "\t")
    elif fmt in ("mtx", "matrixmarket", "mm"):
        ds = _read_matrix_market(path)
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")
    if labels is not None:
        lab = load_labels(labels)
        if len(lab) != ds.X.shape[1]:
            raise MatrixFormatError(f"{labels}: {len(lab)} labels for {ds.X.shape[1]} samples")
        ds.truth = encode_labels(lab)
    return ds


def save_matrix(path, X, feature_names=None, sample_names=None, corner="", delimiter=","):
    """Write ``X`` with 17 significant digits so values round-trip exactly."""
    X = np.asarray(X, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        if sample_names is not None:
            w.writerow(([corner] if feature_names is not None else []) + list(sample_names))
        for i, row in enumerate(X):
            cells = [f"{v:.17g}" for v in row]
            w.writerow(([feature_names[i]] if feature_names is not None else []) + cells)


def preprocess_scrna(ds, dropout_fraction=0.7):
    """Drop sparsely expressed genes, then apply log2(1 + x).

    A gene (row) is removed when its number of exact zeros exceeds
    ``dropout_fraction * n``.
    """
    X = ds.X
    n = X.shape[1]
    zeros = np.count_nonzero(X == 0, axis=1)
    keep = zeros <= dropout_fraction * n
    if not np.any(keep):
        raise ValueError("every feature was removed by the dropout filter")
    names = [ds.feature_names[i] for i in np.flatnonzero(keep)] if ds.feature_names is not None else None
    return LabeledDataset(np.log2(1.0 + X[keep]), ds.truth, names, ds.sample_names)
