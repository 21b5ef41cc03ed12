"""Compare PALM with monotone accelerated PALM on one penalized problem.

Both solve ONMF_l20 at a fixed penalty rho = 0.5 from the same random
start. The accelerated solver extrapolates and keeps the step only when
the objective does not go up.

    python3 demos/02_palm_vs_mapalm.py
"""

import numpy as np

from ssnmf import Init, ModelSpec, SolverConfig, Variant, fit, synthetic_three_block

X = synthetic_three_block(seed=1).X
spec = ModelSpec(Variant.ONMF_L20_FIXED_RHO, rank=3, k=120, rho0=0.5)

for accelerate in (False, True):
    cfg = SolverConfig(accelerate=accelerate, seed=1, init=Init.RANDOM_NORMAL_ABS)
    pair, report = fit(X, spec, cfg)
    name = "maPALM" if accelerate else "PALM"
    accepted = sum(e.extrapolated for e in report.trace)
    print(f"{name:<7} iterations {report.iterations:>5}  final objective {pair.objective:.4f}  "
          f"accepted extrapolations {accepted}")
    F = report.objectives
    marks = [1, 10, 50, 100, len(F)]
    print("        objective at", ", ".join(f"t={t}: {F[t - 1]:.3f}" for t in marks if t <= len(F)))
    assert np.all(np.diff(F) <= 1e-10)  # never increases
