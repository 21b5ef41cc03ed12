import csv
import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from ssnmf.cli import ExperimentConfig, UsageError, main, run_compare
from ssnmf.data import load_matrix, save_matrix
from ssnmf.solver import ModelSpec, SolverConfig, Variant

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "report.schema.json").read_text())
FAST = ["--max-iter", "15", "--continuation-steps", "2"]


@pytest.fixture(autouse=True)
def one_thread(monkeypatch):
    monkeypatch.setenv("SSNMF_THREADS", "1")


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_generate_is_reproducible(tmp_path):
    assert main(["generate", "three-block", "--seed", "4", "--out", str(tmp_path / "a")]) == 0
    assert main(["generate", "--generate", "three-block", "--seed", "4", "--out", str(tmp_path / "b")]) == 0
    for name in ("X.csv", "labels.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    ds = load_matrix(tmp_path / "a" / "X.csv", labels=tmp_path / "a" / "labels.txt")
    assert ds.X.shape == (500, 60) and len(set(ds.truth.tolist())) == 3


def test_generate_unknown_kind(tmp_path, capsys):
    assert main(["generate", "spiral", "--out", str(tmp_path)]) != 0
    assert "unknown dataset kind" in capsys.readouterr().err


def test_solve_writes_every_artifact(tmp_path):
    out = tmp_path / "run"
    code = main(["solve", "--generate", "three-block", "--model", "onmf-l20", "--rank", "3", "--k", "100",
                 "--restarts", "2", "--out", str(out), *FAST])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    jsonschema.validate(report, SCHEMA)
    assert [r["seed"] for r in report["restarts"]] == [0, 1]
    assert report["aggregate"]["completed"] == 2
    assert report["aggregate"]["nmi_mean"] is not None
    for i in range(2):
        rdir = out / f"restart_{i:02d}"
        rec = json.loads((rdir / "report.json").read_text())
        trace = _rows(rdir / "trace.csv")
        assert trace[0] == ["iteration", "objective", "relative_change", "rho", "accepted_extrapolation"]
        assert len(trace) == rec["iterations"] + 1
        assert {row[4] for row in trace[1:]} <= {"0", "1"}
        assert rec["rho_history"] == pytest.approx([0.1, 0.15])
        W = load_matrix(rdir / "W.csv")
        H = load_matrix(rdir / "H.csv")
        assert W.X.shape == (500, 3) and H.X.shape == (3, 60)
        assert np.count_nonzero(np.any(W.X != 0, axis=1)) <= 100
        labels = _rows(rdir / "labels.csv")
        assert labels[0] == ["sample", "cluster"] and len(labels) == 61


def test_solve_without_labels_omits_metrics(tmp_path):
    X = np.random.default_rng(0).random((10, 8))
    save_matrix(tmp_path / "X.csv", X)
    out = tmp_path / "run"
    assert main(["solve", "--dataset", str(tmp_path / "X.csv"), "--model", "nmf", "--rank", "2",
                 "--out", str(out), *FAST]) == 0
    report = json.loads((out / "report.json").read_text())
    jsonschema.validate(report, SCHEMA)
    assert set(report["restarts"][0]["metrics"]) == {"orthogonality"}
    assert "nmi_mean" not in report["aggregate"]


def test_solve_with_label_sidecar(tmp_path):
    X = np.random.default_rng(1).random((10, 6))
    save_matrix(tmp_path / "X.csv", X, sample_names=[f"c{j}" for j in range(6)], corner="gene",
                feature_names=[f"g{i}" for i in range(10)])
    (tmp_path / "lab.txt").write_text("a\na\nb\nb\nc\nc\n")
    out = tmp_path / "run"
    assert main(["solve", "--dataset", str(tmp_path / "X.csv"), "--labels", str(tmp_path / "lab.txt"),
                 "--model", "nmf-lc0", "--k", "3", "--rank", "3", "--out", str(out), *FAST]) == 0
    report = json.loads((out / "report.json").read_text())
    assert 0 <= report["restarts"][0]["metrics"]["nmi"] <= 1
    H = load_matrix(out / "restart_00" / "H.csv")
    assert H.sample_names == [f"c{j}" for j in range(6)]


def test_solve_usage_errors(tmp_path):
    base = ["solve", "--rank", "3", "--out", str(tmp_path)]
    assert main([*base, "--generate", "three-block", "--model", "nope"]) == 2
    assert main([*base, "--model", "nmf"]) == 2
    assert main([*base, "--generate", "three-block", "--model", "nmf-l20"]) == 2  # no k
    assert main([*base, "--generate", "three-block", "--model", "nmf", "--restarts", "0"]) == 2


def test_solve_failed_restart_is_recorded(tmp_path):
    out = tmp_path / "run"
    # k larger than p is only detected inside the solve
    assert main(["solve", "--generate", "three-block", "--model", "nmf-l20", "--k", "900", "--rank", "3",
                 "--out", str(out), *FAST]) == 1
    report = json.loads((out / "report.json").read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["restarts"][0]["status"] == "failed"
    assert report["aggregate"]["completed"] == 0


def test_solve_is_byte_reproducible(tmp_path):
    args = ["solve", "--generate", "outlier", "--model", "onmf-l20", "--k", "90", "--rank", "2", *FAST]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b")]) == 0
    for name in ("report.json", "restart_00/trace.csv", "restart_00/W.csv", "restart_00/H.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_compare_table(tmp_path, capsys):
    out = tmp_path / "cmp"
    code = main(["compare", "--generate", "three-block", "--rank", "3", "--model", "nmf",
                 "--model", "nmf-l20:k=120", "--model", "onmf-l20:k=120", "--out", str(out), *FAST])
    assert code == 0
    rows = _rows(out / "comparison.csv")
    assert rows[0][:3] == ["method", "k", "restarts"]
    assert [r[0] for r in rows[1:]] == ["nmf", "nmf-l20", "onmf-l20"]
    assert [r[1] for r in rows[1:]] == ["", "120", "120"]
    printed = capsys.readouterr().out
    assert printed == (out / "comparison.txt").read_text()
    assert "NMI %" in printed and len(printed.splitlines()) == 4


def test_compare_identical_configs_give_identical_rows(tmp_path):
    cfg = ExperimentConfig(ModelSpec(Variant.NMF, 3), SolverConfig(max_iter=10), generate="three-block")
    rows, _ = run_compare([cfg, cfg], tmp_path)
    assert rows[0] == rows[1]


def test_compare_rejects_empty_or_mixed(tmp_path):
    with pytest.raises(UsageError):
        run_compare([], tmp_path)
    a = ExperimentConfig(ModelSpec(Variant.NMF, 3), generate="three-block")
    b = ExperimentConfig(ModelSpec(Variant.NMF, 3), generate="outlier")
    with pytest.raises(UsageError):
        run_compare([a, b], tmp_path)
    assert main(["compare", "--generate", "three-block", "--rank", "3", "--out", str(tmp_path)]) == 2


def _factors(tmp_path):
    W = np.zeros((6, 2))
    W[:, 0] = [9, 1, 1, 1, 1, 1]
    W[:, 1] = [1, 1, 1, 1, 1, 9]
    H = np.array([[1.0, 0.0, 0.4], [0.0, 1.0, 0.2]])
    save_matrix(tmp_path / "W.csv", W, [f"g{i}" for i in range(6)], ["factor_0", "factor_1"], corner="feature")
    save_matrix(tmp_path / "H.csv", H, ["factor_0", "factor_1"], ["s0", "s1", "s2"], corner="factor")


def test_biclusters_round_trip(tmp_path):
    _factors(tmp_path)
    out = tmp_path / "bic.json"
    assert main(["biclusters", "--W", str(tmp_path / "W.csv"), "--H", str(tmp_path / "H.csv"),
                 "--threshold-T", "1.5", "--out", str(out)]) == 0
    bics = json.loads(out.read_text())["biclusters"]
    assert [b["features"] for b in bics] == [["g0"], ["g5"]]
    assert [b["samples"] for b in bics] == [["s0", "s2"], ["s1"]]


def test_biclusters_infinite_threshold_warns(tmp_path, capsys):
    _factors(tmp_path)
    assert main(["biclusters", "--W", str(tmp_path / "W.csv"), "--H", str(tmp_path / "H.csv"),
                 "--threshold-T", "inf", "--out", str(tmp_path / "b.json")]) == 0
    assert "empty feature set" in capsys.readouterr().err
    assert json.loads((tmp_path / "b.json").read_text())["threshold"] is None


def test_biclusters_shape_mismatch(tmp_path):
    _factors(tmp_path)
    save_matrix(tmp_path / "H3.csv", np.ones((3, 3)))
    assert main(["biclusters", "--W", str(tmp_path / "W.csv"), "--H", str(tmp_path / "H3.csv"),
                 "--threshold-T", "1", "--out", str(tmp_path / "b.json")]) == 2
