"""Command-line experiments: generate data, solve, compare models, extract biclusters.

    ssnmf generate three-block --seed 7 --out data/
    ssnmf solve --generate three-block --model nmf-l20 --rank 3 --k 120 --restarts 10 --out runs/l20
    ssnmf compare --generate three-block --model nmf --model nmf-l20:k=120 --rank 3 --out runs/cmp
    ssnmf biclusters --W runs/l20/restart_00/W.csv --H runs/l20/restart_00/H.csv --threshold-T 1.5 --out bic.json

Everything written except ``timing.json`` is a deterministic function of the
arguments.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import extract_biclusters
from .data import (
    LabeledDataset,
    load_matrix,
    save_labels,
    save_matrix,
    synthetic_outlier,
    synthetic_three_block,
)
from .metrics import assign_clusters, entropy_metric, nmi, orthogonality_score, purity
from .solver import Init, ModelSpec, SolverConfig, Variant, fit

GENERATORS = {
    "three-block": synthetic_three_block,
    "outlier": synthetic_outlier,
}

TRACE_HEADER = ["iteration", "objective", "relative_change", "rho", "accepted_extrapolation"]


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    spec: ModelSpec
    solver: SolverConfig = field(default_factory=SolverConfig)
    generate: str | None = None
    data_seed: int = 0
    dataset: str | None = None
    labels: str | None = None
    restarts: int = 1
    out: str = "ssnmf-out"

    def __post_init__(self):
        if self.restarts < 1:
            raise UsageError("restarts must be >= 1")
        if (self.generate is None) == (self.dataset is None):
            raise UsageError("give exactly one of --generate or --dataset")
        if self.generate is not None and self.generate not in GENERATORS:
            raise UsageError(f"unknown generator {self.generate!r}; choose from {sorted(GENERATORS)}")

    def load(self):
        if self.generate is not None:
            return GENERATORS[self.generate](self.data_seed)
        return load_matrix(self.dataset, labels=self.labels)

    def describe(self):
        spec = asdict(self.spec)
        spec["variant"] = self.spec.variant.value
        solver = asdict(self.solver)
        solver["init"] = self.solver.init.value
        return {
            "dataset": {"generate": self.generate, "data_seed": self.data_seed, "path": self.dataset, "labels": self.labels},
            "model": spec,
            "solver": solver,
            "restarts": self.restarts,
        }


def thread_count():
    raw = os.environ.get("SSNMF_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise UsageError(f"SSNMF_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _json_float(v):
    return v if v is None or math.isfinite(v) else None


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_trace(path, report):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for e in report.trace:
            w.writerow([e.iteration, f"{e.objective:.17g}", f"{e.relative_change:.17g}", f"{e.rho:.17g}", int(e.extrapolated)])


def clustering_metrics(H, truth):
    m = {"orthogonality": orthogonality_score(H)}
    if truth is None:
        return m
    pred = assign_clusters(H)
    m["nmi"] = nmi(pred, truth)
    m["purity"] = purity(pred, truth)
    m["entropy"] = entropy_metric(pred, truth) if len(np.unique(truth)) >= 2 else None
    return m


def _run_restart(X, cfg, idx):
    seed = cfg.solver.seed + idx
    pair, report = fit(X, cfg.spec, replace(cfg.solver, seed=seed))
    return seed, pair, report


def _aggregate(records, has_truth):
    ok = [r for r in records if r["status"] == "ok"]
    agg = {"completed": len(ok), "requested": len(records)}
    keys = ["nmi", "purity", "entropy"] if has_truth else []
    for key in keys:
        vals = [r["metrics"][key] for r in ok if r["metrics"].get(key) is not None]
        agg[f"{key}_mean"] = float(np.mean(vals)) if vals else None
        # population std, so a single restart reports 0
        agg[f"{key}_std"] = float(np.std(vals)) if vals else None
    orth = [r["metrics"]["orthogonality"] for r in ok]
    agg["orth_mean"] = float(np.mean(orth)) if orth else None
    return agg


def run_solve(cfg, ds=None):
    """Run every restart of ``cfg`` and write its artifacts.

    Returns the aggregate report dict; ``report["aggregate"]["completed"]``
    tells whether all restarts succeeded.
    """
    ds = ds if ds is not None else cfg.load()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    threads = thread_count()
    sample_names = ds.sample_names or [f"sample_{j}" for j in range(ds.X.shape[1])]
    factor_names = [f"factor_{i}" for i in range(cfg.spec.rank)]

    def task(idx):
        try:
            return idx, _run_restart(ds.X, cfg, idx), None
        except Exception as exc:  # recorded per restart, run continues
            return idx, None, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=min(threads, cfg.restarts)) as pool:
        results = list(pool.map(task, range(cfg.restarts)))

    records, timing = [], {}
    for idx, res, err in results:
        rdir = out / f"restart_{idx:02d}"
        rdir.mkdir(exist_ok=True)
        if err is not None:
            rec = {"restart": idx, "seed": cfg.solver.seed + idx, "status": "failed", "error": err}
            _write_json(rdir / "report.json", rec)
            records.append(rec)
            continue
        seed, pair, report = res
        save_matrix(rdir / "W.csv", pair.W, ds.feature_names, factor_names, corner="feature")
        save_matrix(rdir / "H.csv", pair.H, factor_names, sample_names, corner="factor")
        pred = assign_clusters(pair.H)
        with open(rdir / "labels.csv", "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample", "cluster"])
            w.writerows(zip(sample_names, pred.tolist()))
        write_trace(rdir / "trace.csv", report)
        rec = {
            "restart": idx,
            "seed": seed,
            "status": "ok",
            "objective": _json_float(pair.objective),
            "iterations": pair.iterations,
            "termination": report.termination.value,
            "rho_history": report.rho_history,
            "selected_features": int(np.count_nonzero(np.any(pair.W != 0, axis=1))),
        }
        rec["metrics"] = clustering_metrics(pair.H, ds.truth)
        _write_json(rdir / "report.json", rec)
        timing[f"restart_{idx:02d}"] = report.wall_time
        records.append(rec)

    full = {
        "config": cfg.describe(),
        "environment": {"version": __version__, "seed": cfg.solver.seed, "threads": threads},
        "restarts": records,
        "aggregate": _aggregate(records, ds.truth is not None),
    }
    _write_json(out / "report.json", full)
    _write_json(out / "timing.json", timing)
    return full


def _fmt(mean, std):
    if mean is None:
        return "n/a"
    return f"{100 * mean:.2f} ± {100 * std:.2f}"


def run_compare(configs, out):
    """Solve each config on the shared dataset and tabulate NMI/Purity/Entropy."""
    if not configs:
        raise UsageError("compare needs at least one model")
    first = configs[0]
    sources = {(c.generate, c.data_seed, c.dataset, c.labels) for c in configs}
    if len(sources) != 1:
        raise UsageError("all compared configs must share one dataset")
    ds = first.load()
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for i, cfg in enumerate(configs):
        name = cfg.spec.variant.value
        cfg = replace(cfg, out=str(out / f"{i:02d}_{name}"))
        agg = run_solve(cfg, ds)["aggregate"]
        rows.append({
            "method": name,
            "k": "" if cfg.spec.k is None else cfg.spec.k,
            "restarts": agg["completed"],
            **{f"{m}_{s}": agg.get(f"{m}_{s}") for m in ("nmi", "purity", "entropy") for s in ("mean", "std")},
        })

    with open(out / "comparison.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in r.items()})
    lines = [f"{'method':<14}{'k':>6}  {'NMI %':>16}  {'Purity %':>16}  {'Entropy %':>16}"]
    for r in rows:
        lines.append(
            f"{r['method']:<14}{str(r['k']):>6}  {_fmt(r['nmi_mean'], r['nmi_std']):>16}  "
            f"{_fmt(r['purity_mean'], r['purity_std']):>16}  {_fmt(r['entropy_mean'], r['entropy_std']):>16}"
        )
    table = "\n".join(lines) + "\n"
    (out / "comparison.txt").write_text(table, encoding="utf-8")
    return rows, table


def run_biclusters(W_path, H_path, T, out_path):
    Wd = load_matrix(W_path)
    Hd = load_matrix(H_path)
    if Wd.X.shape[1] != Hd.X.shape[0]:
        raise UsageError(f"W has {Wd.X.shape[1]} factors but H has {Hd.X.shape[0]}")
    bics = extract_biclusters(Wd.X, Hd.X, T)
    payload = {
        "threshold": _json_float(float(T)),
        "biclusters": [b.to_dict(Wd.feature_names, Hd.sample_names) for b in bics],
    }
    _write_json(out_path, payload)
    return bics


# --- argument parsing -------------------------------------------------------

def _parse_model(text, base_k, base_rho):
    """``name`` or ``name:k=120,rho=1`` -> (variant, k, rho)."""
    name, _, opts = text.partition(":")
    try:
        variant = Variant(name)
    except ValueError:
        raise UsageError(f"unknown model {name!r}; choose from {[v.value for v in Variant]}") from None
    k, rho = base_k, base_rho
    for item in filter(None, opts.split(",")):
        key, _, val = item.partition("=")
        if key == "k":
            k = int(val)
        elif key == "rho":
            rho = float(val)
        else:
            raise UsageError(f"unknown model option {key!r}")
    return variant, k, rho


def _add_data_args(p):
    p.add_argument("--dataset", help="matrix file (csv, tsv or mtx); rows are features")
    p.add_argument("--generate", choices=sorted(GENERATORS), help="use a synthetic dataset instead")
    p.add_argument("--data-seed", type=int, default=0, help="seed for --generate (default 0)")
    p.add_argument("--labels", help="truth label sidecar, one label per sample")


def _add_model_args(p, multiple):
    if multiple:
        p.add_argument("--model", action="append", default=[], help="model, optionally name:k=..,rho=.. (repeatable)")
    else:
        p.add_argument("--model", default="nmf-l20", help="model variant (default nmf-l20)")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--k", type=int, help="sparsity level")
    p.add_argument("--rho", type=float, default=0.1, help="penalty (start value for continuation)")
    p.add_argument("--gamma", type=float, default=1.5)
    p.add_argument("--continuation-steps", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--accelerate", choices=["on", "off"], default="on")
    p.add_argument("--init", choices=["random", "warm"], default="warm")
    p.add_argument("--seed", type=int, default=0, help="base seed; restart i uses seed + i")
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--out", required=True)


def build_parser():
    parser = argparse.ArgumentParser(prog="ssnmf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset")
    g.add_argument("kind", nargs="?", help="three-block or outlier")
    g.add_argument("--generate", dest="kind_flag", help="same as the positional kind")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output directory")

    s = sub.add_parser("solve", help="run restarts of one model")
    _add_data_args(s)
    _add_model_args(s, multiple=False)

    c = sub.add_parser("compare", help="tabulate several models on one dataset")
    _add_data_args(c)
    _add_model_args(c, multiple=True)

    b = sub.add_parser("biclusters", help="extract biclusters from saved factors")
    b.add_argument("--W", required=True, dest="W")
    b.add_argument("--H", required=True, dest="H")
    b.add_argument("--threshold-T", type=float, required=True, dest="T")
    b.add_argument("--out", required=True)
    return parser


def _config_from_args(a, model_text):
    variant, k, rho = _parse_model(model_text, a.k, a.rho)
    try:
        spec = ModelSpec(variant, a.rank, k, rho, a.gamma, a.continuation_steps)
        solver = SolverConfig(
            epsilon=a.epsilon,
            max_iter=a.max_iter,
            accelerate=a.accelerate == "on",
            seed=a.seed,
            init=Init(a.init),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return ExperimentConfig(spec, solver, a.generate, a.data_seed, a.dataset, a.labels, a.restarts, a.out)


def cmd_generate(kind, seed, out):
    if kind not in GENERATORS:
        raise UsageError(f"unknown dataset kind {kind!r}; choose from {sorted(GENERATORS)}")
    ds: LabeledDataset = GENERATORS[kind](seed)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix(out / "X.csv", ds.X)
    save_labels(out / "labels.txt", ds.truth.tolist())
    return ds


def main(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        if a.command == "generate":
            kind = a.kind or a.kind_flag
            if kind is None:
                raise UsageError("generate needs a dataset kind")
            cmd_generate(kind, a.seed, a.out)
            return 0
        if a.command == "solve":
            report = run_solve(_config_from_args(a, a.model))
            agg = report["aggregate"]
            print(f"{agg['completed']}/{agg['requested']} restarts completed; report in {a.out}/report.json")
            return 0 if agg["completed"] == agg["requested"] else 1
        if a.command == "compare":
            configs = [_config_from_args(a, m) for m in a.model]
            rows, table = run_compare(configs, a.out)
            print(table, end="")
            return 0 if all(r["restarts"] == a.restarts for r in rows) else 1
        if a.command == "biclusters":
            bics = run_biclusters(a.W, a.H, a.T, a.out)
            if all(not b.feature_indices for b in bics):
                print("warning: every bicluster has an empty feature set", file=sys.stderr)
            return 0
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ssnmf: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"ssnmf: error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
