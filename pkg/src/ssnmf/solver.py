"""PALM, monotone accelerated PALM and penalty continuation solvers.

Every solver alternates an H-step then a W-step:

    H <- P_+(H - grad_H F / L_H)
    W <- prox_variant(W - grad_W F / L_W)

with ``L_H`` evaluated at the current W and ``L_W`` at the new H.
"""

import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .linalg import as_matrix
from .objective import (
    grad_H,
    grad_W,
    lipschitz_H,
    lipschitz_W,
    objective_value,
    step_constant,
)
from .prox import (
    project_nonneg,
    prox_col_sparse_nonneg,
    prox_entry_sparse_nonneg,
    prox_row_sparse_nonneg,
)

# added to the stopping-rule denominator
_REL_GUARD = 1e-30


class Variant(str, Enum):
    NMF = "nmf"
    ONMF = "onmf"
    NMF_L20 = "nmf-l20"
    NMF_LC0 = "nmf-lc0"
    NMF_L0 = "nmf-l0"
    ONMF_L20 = "onmf-l20"
    ONMF_LC0 = "onmf-lc0"
    ONMF_L0 = "onmf-l0"
    ONMF_L20_FIXED_RHO = "onmf-l20-rho"

    @property
    def constraint(self):
        """One of ``"none"``, ``"row"``, ``"col"``, ``"entry"``."""
        return _CONSTRAINT[self]

    @property
    def continuation(self):
        """True for orthogonal variants solved by penalty continuation."""
        return self.value.startswith("onmf") and self is not Variant.ONMF_L20_FIXED_RHO

    @property
    def penalized(self):
        return self.value.startswith("onmf")


_CONSTRAINT = {
    Variant.NMF: "none",
    Variant.ONMF: "none",
    Variant.NMF_L20: "row",
    Variant.ONMF_L20: "row",
    Variant.ONMF_L20_FIXED_RHO: "row",
    Variant.NMF_LC0: "col",
    Variant.ONMF_LC0: "col",
    Variant.NMF_L0: "entry",
    Variant.ONMF_L0: "entry",
}


class Init(str, Enum):
    RANDOM_NORMAL_ABS = "random"
    NMF_WARM_START = "warm"


class Termination(str, Enum):
    TOLERANCE = "TOLERANCE"
    MAX_ITER = "MAX_ITER"


@dataclass(frozen=True)
class ModelSpec:
    """Model variant and its hyperparameters.

    ``k`` counts rows for l2,0 variants, entries per column for lc,0
    variants, and entries per factor for l0 variants (total budget
    ``k * rank``). ``rho0`` is the fixed penalty of ``ONMF_L20_FIXED_RHO`` and
    the starting penalty of the continuation variants.
    """

    variant: Variant
    rank: int
    k: int | None = None
    rho0: float = 0.1
    gamma: float = 1.5
    continuation_steps: int = 10

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.variant.constraint != "none":
            if self.k is None or self.k < 0:
                raise ValueError(f"{self.variant.value} needs a nonnegative k")
        if self.rho0 < 0:
            raise ValueError("rho0 must be nonnegative")
        if self.variant.continuation:
            if not self.gamma > 1:
                raise ValueError("gamma must exceed 1 for continuation")
            if self.continuation_steps < 1:
                raise ValueError("continuation_steps must be >= 1")

    def check_data(self, X):
        p = X.shape[0]
        if self.variant.constraint in ("row", "col") and self.k > p:
            raise ValueError(f"k={self.k} exceeds the number of features p={p}")


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-3
    max_iter: int = 2000
    accelerate: bool = True
    seed: int = 0
    init: Init = Init.NMF_WARM_START
    warm_start_iter: int = 200
    warm_start_epsilon: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "init", Init(self.init))
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class FactorPair:
    W: np.ndarray
    H: np.ndarray
    objective: float = math.nan
    iterations: int = 0


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    objective: float
    relative_change: float
    rho: float
    extrapolated: bool


@dataclass
class SolverReport:
    trace: list = field(default_factory=list)
    termination: Termination = Termination.MAX_ITER
    wall_time: float = 0.0
    rho_history: list = field(default_factory=list)
    initial_objective: float = math.nan
    # per continuation stage: the FactorPair reached at that stage's rho
    stages: list = field(default_factory=list)

    @property
    def objectives(self):
        return np.array([e.objective for e in self.trace])

    @property
    def iterations(self):
        return len(self.trace)


def prox_variant(M, spec):
    c = spec.variant.constraint
    if c == "none":
        return project_nonneg(M)
    if c == "row":
        return prox_row_sparse_nonneg(M, spec.k)
    if c == "col":
        return prox_col_sparse_nonneg(M, spec.k)
    return prox_entry_sparse_nonneg(M, spec.k * spec.rank)


def _check_data(X):
    X = as_matrix(X, "X")
    if np.any(X < 0):
        raise ValueError("X has negative entries")
    return X


def init_factors(X, spec, config):
    """Seeded starting point, feasible for ``spec``.

    Both modes draw ``|N(0, 1)|`` entries for W (p x r) then H (r x n) from
    ``numpy.random.default_rng(config.seed)``. The warm start then runs
    plain NMF with PALM for at most ``config.warm_start_iter`` iterations.
    W is finally projected onto the variant's constraint set.
    """
    X = _check_data(X)
    spec.check_data(X)
    p, n = X.shape
    rng = np.random.default_rng(config.seed)
    W = np.abs(rng.standard_normal((p, spec.rank)))
    H = np.abs(rng.standard_normal((spec.rank, n)))
    if config.init is Init.NMF_WARM_START:
        nmf = ModelSpec(Variant.NMF, spec.rank)
        warm = SolverConfig(
            epsilon=config.warm_start_epsilon,
            max_iter=config.warm_start_iter,
            accelerate=False,
        )
        pair, _ = palm_solve(X, nmf, 0.0, FactorPair(W, H), warm)
        W, H = pair.W, pair.H
    W = prox_variant(W, spec)
    return FactorPair(W, H, objective_value(X, W, H, 0.0), 0)


def _palm_step(X, spec, rho, W, H_point, W_point):
    """One H-step then W-step. Step constants use W and the new H."""
    L_H = step_constant(lipschitz_H(W, rho))
    H_new = project_nonneg(H_point - grad_H(X, W, H_point, rho) / L_H)
    L_W = step_constant(lipschitz_W(H_new))
    W_new = prox_variant(W_point - grad_W(X, W_point, H_new) / L_W, spec)
    return W_new, H_new


def _relative_change(W_new, H_new, W, H):
    num = np.sum((W_new - W) ** 2) + np.sum((H_new - H) ** 2)
    den = np.sum(W * W) + np.sum(H * H)
    return float(np.sqrt(num) / (np.sqrt(den) + _REL_GUARD))


def _tau_schedule():
    tau = 1.0
    while True:
        tau_next = (1.0 + math.sqrt(1.0 + 4.0 * tau * tau)) / 2.0
        yield (tau - 1.0) / tau_next
        tau = tau_next


def extrapolation_weights(count):
    """First ``count`` weights ``omega_t = (tau_t - 1) / tau_{t+1}``, tau_0 = 1."""
    gen = _tau_schedule()
    return [next(gen) for _ in range(count)]


def _solve(X, spec, rho, start, config, accelerate, omega=None, callback=None):
    X = _check_data(X)
    spec.check_data(X)
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    W = as_matrix(start.W, "W").copy()
    H = as_matrix(start.H, "H").copy()
    if W.shape != (X.shape[0], spec.rank) or H.shape != (spec.rank, X.shape[1]):
        raise ValueError(f"start shapes W {W.shape}, H {H.shape} do not match X {X.shape} and rank {spec.rank}")

    t0 = time.perf_counter()
    F = objective_value(X, W, H, rho)
    report = SolverReport(initial_objective=F, rho_history=[rho])
    W_prev, H_prev = W, H
    weights = _tau_schedule()

    for t in range(1, config.max_iter + 1):
        extrapolated = False
        if accelerate:
            w_t = next(weights) if omega is None else omega(t - 1)
            H_ex = H + w_t * (H - H_prev)
            W_ex = W + w_t * (W - W_prev)
            W_new, H_new = _palm_step(X, spec, rho, W, H_ex, W_ex)
            F_new = objective_value(X, W_new, H_new, rho)
            extrapolated = F_new <= F
            if not extrapolated:
                W_new, H_new = _palm_step(X, spec, rho, W, H, W)
                F_new = objective_value(X, W_new, H_new, rho)
        else:
            W_new, H_new = _palm_step(X, spec, rho, W, H, W)
            F_new = objective_value(X, W_new, H_new, rho)
        if not math.isfinite(F_new):
            raise FloatingPointError(f"objective became non-finite at iteration {t}")

        rel = _relative_change(W_new, H_new, W, H)
        W_prev, H_prev, W, H, F = W, H, W_new, H_new, F_new
        report.trace.append(TraceEntry(t, F, rel, rho, extrapolated))
        if callback is not None:
            callback(t, W, H)
        if rel < config.epsilon:
            report.termination = Termination.TOLERANCE
            break

    report.wall_time = time.perf_counter() - t0
    return FactorPair(W, H, F, len(report.trace)), report


def palm_solve(X, spec, rho, start, config, callback=None):
    """Plain PALM at a fixed penalty ``rho``.

    ``callback(t, W, H)``, if given, sees every accepted iterate.
    """
    return _solve(X, spec, rho, start, config, accelerate=False, callback=callback)


def mapalm_solve(X, spec, rho, start, config, omega=None, callback=None):
    """Monotone accelerated PALM at a fixed penalty ``rho``.

    Each iteration extrapolates both blocks by ``omega_t`` and takes the
    PALM step from the extrapolated point. The candidate is kept only if
    the objective does not increase; otherwise the iteration is redone as a
    plain PALM step from the current iterate. The tau sequence keeps
    advancing either way.

    ``omega`` optionally overrides the weight schedule with a callable
    ``t -> omega_t`` (t counted from 0). ``callback`` is as in
    :func:`palm_solve`.
    """
    return _solve(X, spec, rho, start, config, accelerate=True, omega=omega, callback=callback)


def _inner(X, spec, rho, start, config, callback=None):
    if config.accelerate:
        return mapalm_solve(X, spec, rho, start, config, callback=callback)
    return palm_solve(X, spec, rho, start, config, callback=callback)


def continuation_solve(X, spec, config, start=None, callback=None):
    """Solve a sequence of penalized problems with rho growing geometrically.

    Starts at ``spec.rho0`` and multiplies by ``spec.gamma`` after each of
    the ``spec.continuation_steps`` stages, warm-starting every stage from
    the previous solution. The returned trace concatenates the stages with a
    running iteration counter, which is also what ``callback`` receives.
    """
    if not spec.variant.continuation:
        raise ValueError(f"{spec.variant.value} is not solved by continuation")
    t0 = time.perf_counter()
    pair = init_factors(X, spec, config) if start is None else start
    report = SolverReport()
    rho = spec.rho0
    offset = 0
    for stage in range(spec.continuation_steps):
        hook = None if callback is None else (lambda t, W, H, off=offset: callback(t + off, W, H))
        pair, inner = _inner(X, spec, rho, pair, config, hook)
        if stage == 0:
            report.initial_objective = inner.initial_objective
        report.trace.extend(
            TraceEntry(e.iteration + offset, e.objective, e.relative_change, e.rho, e.extrapolated)
            for e in inner.trace
        )
        offset += len(inner.trace)
        report.rho_history.append(rho)
        report.stages.append(FactorPair(pair.W.copy(), pair.H.copy(), pair.objective, pair.iterations))
        report.termination = inner.termination
        rho *= spec.gamma
    pair = FactorPair(pair.W, pair.H, pair.objective, offset)
    report.wall_time = time.perf_counter() - t0
    return pair, report


def fit(X, spec, config=None, start=None, callback=None):
    """Solve ``spec`` on ``X`` with the algorithm its variant calls for.

    Continuation variants go through :func:`continuation_solve`;
    ``ONMF_L20_FIXED_RHO`` is a single solve at ``spec.rho0``; the NMF
    variants are a single solve without penalty.
    """
    config = config or SolverConfig()
    if spec.variant.continuation:
        return continuation_solve(X, spec, config, start, callback)
    if start is None:
        start = init_factors(X, spec, config)
    rho = spec.rho0 if spec.variant is Variant.ONMF_L20_FIXED_RHO else 0.0
    return _inner(X, spec, rho, start, config, callback)
