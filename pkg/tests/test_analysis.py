import numpy as np
import pytest

from ssnmf.analysis import Bicluster, detect_outliers, extract_biclusters


def test_z_score_feature_selection():
    W = np.zeros((10, 1))
    W[0, 0] = 10.0
    # z of entry 0: (10 - 1) / 3 = 3; others (0 - 1) / 3
    (b,) = extract_biclusters(W, np.ones((1, 4)), 1.5)
    assert b.feature_indices == [0]
    assert b.sample_indices == [0, 1, 2, 3]


def test_identity_H_assigns_each_sample_once(rng):
    W = rng.random((20, 3))
    bics = extract_biclusters(W, np.eye(3), 1.0)
    assert [b.sample_indices for b in bics] == [[0], [1], [2]]


def test_infinite_threshold_gives_empty_features(rng):
    bics = extract_biclusters(rng.random((20, 3)), rng.random((3, 6)), np.inf)
    assert all(b.feature_indices == [] for b in bics)


def test_constant_column_warns():
    W = np.ones((5, 2))
    W[0, 1] = 4.0
    with pytest.warns(RuntimeWarning, match="constant"):
        bics = extract_biclusters(W, np.eye(2), 0.5)
    assert bics[0].feature_indices == [] and bics[1].feature_indices == [0]


def test_ties_join_every_maximal_factor():
    H = np.array([[1.0, 2.0], [1.0, 0.0]])
    bics = extract_biclusters(np.random.default_rng(0).random((4, 2)), H, 0.0)
    assert bics[0].sample_indices == [0, 1]
    assert bics[1].sample_indices == [0]


def test_bicluster_invariances(rng):
    W = rng.random((30, 3))
    H = rng.random((3, 12))
    base = extract_biclusters(W, H, 1.0)
    s = np.array([2.0, 0.5, 7.0])
    scaled = extract_biclusters(W, 3.5 * H, 1.0)
    assert [b.sample_indices for b in base] == [b.sample_indices for b in scaled]
    assert [b.feature_indices for b in base] == [b.feature_indices for b in extract_biclusters(W * s, H, 1.0)]
    covered = sorted(set().union(*(b.sample_indices for b in base)))
    assert covered == list(range(12))


def test_shape_mismatch(rng):
    with pytest.raises(ValueError):
        extract_biclusters(rng.random((4, 2)), rng.random((3, 5)), 1.0)


def test_to_dict_with_names():
    b = Bicluster(1, [0, 2], [1], 1.5)
    d = b.to_dict(["a", "b", "c"], ["s0", "s1"])
    assert d["features"] == ["a", "c"] and d["samples"] == ["s1"]


def test_detect_outliers():
    H = np.array([[1.0, 0.0, 3.0], [2.0, 0.0, 0.5]])
    assert detect_outliers(H, 1) == [1]
    assert sorted(detect_outliers(H, 3)) == [0, 1, 2]
    assert detect_outliers(H, 3) == [1, 0, 2]
    with pytest.raises(ValueError):
        detect_outliers(H, 4)


def test_detect_outliers_row_permutation_invariant(rng):
    H = rng.random((4, 15))
    assert detect_outliers(H, 5) == detect_outliers(H[rng.permutation(4)], 5)
