"""Evaluation metric, sampling baselines, and brute-force oracles.

The oracles recompute every quantity from scratch with dense projections;
they exist so the recursive production paths can be validated against an
independent route, and are guarded to test-scale inputs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .generalized import generalized_select
from .greedy import SelectionResult, greedy_select
from .linalg import check_column_set, frobenius_sq, randomized_svd, reconstruction_error
from .seeds import derive_seed

__all__ = [
    "EvalReport",
    "MetricUndefinedError",
    "evaluate_selection",
    "relative_accuracy",
    "uniform_select",
    "hybrid_select",
    "sketch_svd_select",
    "naive_greedy_oracle",
    "naive_generalized_oracle",
]

# Exact dense SVD stays feasible up to this size; beyond it the metric
# falls back to the randomized decomposition.
EXACT_SVD_LIMIT = 512

ORACLE_SIZE_LIMIT = 64

HYBRID_MODES = ("uniform", "column-norm", "svd-rows")


class MetricUndefinedError(ValueError):
    """Uniform sampling is already near-optimal; the relative metric is undefined."""


def _lstsq_error(a: np.ndarray, cols: list[int], target: np.ndarray) -> float:
    """Squared residual of ``target`` after least-squares fit on selected columns."""
    sub = a[:, cols]
    coef, *_ = np.linalg.lstsq(sub, target, rcond=None)
    return frobenius_sq(target - sub @ coef)


def best_rank_error(a: np.ndarray, rank: int, seed: int = 0) -> float:
    """Frobenius error of the best rank-``rank`` approximation.

    Exact via dense SVD at small scale, randomized beyond EXACT_SVD_LIMIT.
    """
    m, n = a.shape
    if rank >= min(m, n):
        return 0.0
    if min(m, n) <= EXACT_SVD_LIMIT:
        s = np.linalg.svd(a, compute_uv=False)
        return float(np.sqrt(np.sum(s[rank:] ** 2)))
    res = randomized_svd(a, rank, oversample=10, power_iters=2, seed=seed)
    tail = frobenius_sq(a) - float(np.sum(res.singular_values**2))
    return float(np.sqrt(max(tail, 0.0)))


def uniform_select(n: int, l: int, seed: int) -> list[int]:
    """Uniform sample of ``l`` distinct column indices."""
    if l < 1 or l > n:
        raise ValueError(f"budget l must satisfy 1 <= l <= {n}, got {l}")
    rng = np.random.default_rng(seed)
    return [int(i) for i in rng.choice(n, size=l, replace=False)]


def relative_accuracy(
    a: np.ndarray, columns, uniform_trials: int = 10, seed: int = 0
) -> float:
    """Percent accuracy of a selection between uniform sampling (0) and SVD (100).

    Both numerator and denominator use Frobenius norms (not their squares).
    The uniform reference is the mean error over ``uniform_trials`` subsets
    drawn from a single stream seeded by ``seed``, so a one-trial call
    reproduces :func:`uniform_select` with the same seed.
    """
    cols = check_column_set(columns, a.shape[1])
    l = len(cols)
    if l < 1:
        raise ValueError("selection must contain at least one column")
    if uniform_trials < 1:
        raise ValueError("uniform_trials must be >= 1")
    n = a.shape[1]
    # Rank-tolerant projection throughout: uniform trials can legitimately
    # draw linearly dependent subsets, whose span is still well-defined.
    err_selected = math.sqrt(_lstsq_error(a, cols, a))
    rng = np.random.default_rng(seed)
    uniform_errors = []
    for _ in range(uniform_trials):
        subset = [int(i) for i in rng.choice(n, size=l, replace=False)]
        uniform_errors.append(math.sqrt(_lstsq_error(a, subset, a)))
    err_uniform = float(np.mean(uniform_errors))
    err_best = best_rank_error(a, l, seed=derive_seed(seed, "svd-oracle"))
    denom = err_uniform - err_best
    if denom <= 1e-12 * math.sqrt(frobenius_sq(a)):
        raise MetricUndefinedError(
            "uniform sampling matches the best rank approximation; "
            "the relative metric is undefined"
        )
    return 100.0 * (err_uniform - err_selected) / denom


def hybrid_select(a: np.ndarray, l: int, probability_mode: str, seed: int) -> list[int]:
    """Two-phase selection: probabilistic over-sampling, then greedy reduction.

    The randomized phase samples ceil(l*ln(l)) distinct columns (capped at
    the column count) with the requested probabilities; the deterministic
    phase runs the greedy selection restricted to the sample.
    """
    m, n = a.shape
    if l < 2:
        raise ValueError("hybrid selection needs l >= 2 so the sample can exceed l")
    if l > n:
        raise ValueError(f"budget l must satisfy l <= {n}, got {l}")
    if probability_mode not in HYBRID_MODES:
        raise ValueError(
            f"unknown probability mode {probability_mode!r}, expected one of {HYBRID_MODES}"
        )
    sample_size = min(n, math.ceil(l * math.log(l)))
    rng = np.random.default_rng(derive_seed(seed, "hybrid-sample"))
    if probability_mode == "uniform":
        sampled = rng.choice(n, size=sample_size, replace=False)
    else:
        if probability_mode == "column-norm":
            mass = np.sum(a * a, axis=0)
        else:
            k = min(l, min(m, n))
            svd = randomized_svd(
                a, k, oversample=10, power_iters=2, seed=derive_seed(seed, "hybrid-svd")
            )
            mass = np.sum(svd.v * svd.v, axis=1)
        total = float(mass.sum())
        if total <= 0.0:
            raise ValueError("sampling probabilities have zero total mass")
        probs = mass / total
        # sampling without replacement cannot pick zero-probability columns
        sample_size = min(sample_size, int(np.count_nonzero(probs)))
        sampled = rng.choice(n, size=sample_size, replace=False, p=probs)
    sampled = np.sort(sampled)
    restricted = greedy_select(a[:, sampled], min(l, sampled.size))
    return [int(sampled[j]) for j in restricted.indices]


def sketch_svd_select(a: np.ndarray, l: int, k: int, seed: int) -> list[int]:
    """Select columns that best reconstruct the leading singular directions.

    The target is the rank-``k`` factor U_k scaled by its singular values.
    """
    svd = randomized_svd(
        a, k, oversample=10, power_iters=2, seed=derive_seed(seed, "sketch-svd")
    )
    target = svd.u * svd.singular_values
    return generalized_select(a, target, l).indices


def _check_oracle_scale(a: np.ndarray) -> None:
    m, n = a.shape
    if m > ORACLE_SIZE_LIMIT or n > ORACLE_SIZE_LIMIT:
        raise ValueError(
            f"oracle is restricted to matrices with m, n <= {ORACLE_SIZE_LIMIT}"
        )


def naive_greedy_oracle(a: np.ndarray, l: int) -> SelectionResult:
    """Reference greedy selection by explicit recomputation of every error.

    At each step evaluates the reconstruction error of every remaining
    candidate with a dense least-squares solve; ties within an absolute
    tolerance of 1e-9 times the matrix energy go to the smallest index.
    """
    _check_oracle_scale(a)
    n = a.shape[1]
    if l < 1 or l > n:
        raise ValueError(f"budget l must satisfy 1 <= l <= {n}, got {l}")
    tie_tol = 1e-9 * frobenius_sq(a)
    selected: list[int] = []
    gains: list[float] = []
    current = frobenius_sq(a)
    exhausted = False
    for _ in range(l):
        remaining = [i for i in range(n) if i not in selected]
        errors = np.array([_lstsq_error(a, selected + [i], a) for i in remaining])
        best = errors.min()
        pos = next(j for j, err in enumerate(errors) if err <= best + tie_tol)
        if current - errors[pos] <= tie_tol:
            exhausted = True
            break
        gains.append(current - float(errors[pos]))
        current = float(errors[pos])
        selected.append(remaining[pos])
    return SelectionResult(indices=selected, gains=gains, exhausted=exhausted)


def naive_generalized_oracle(a: np.ndarray, b: np.ndarray, l: int) -> SelectionResult:
    """Reference generalized selection, recomputing both residuals each step.

    Mirrors the production tie-break, deactivation and early-stop rules but
    evaluates the criterion from explicitly formed residual matrices.
    """
    _check_oracle_scale(a)
    if a.shape[0] != b.shape[0]:
        raise ValueError("source and target must have the same number of rows")
    n = a.shape[1]
    if l < 1 or l > n:
        raise ValueError(f"budget l must satisfy 1 <= l <= {n}, got {l}")
    den_init = np.sum(a * a, axis=0)
    target_energy = frobenius_sq(b)
    selected: list[int] = []
    gains: list[float] = []
    exhausted = False
    reconstructed = False
    for _ in range(l):
        if selected:
            sub = a[:, selected]
            coef_a, *_ = np.linalg.lstsq(sub, a, rcond=None)
            coef_b, *_ = np.linalg.lstsq(sub, b, rcond=None)
            res_a = a - sub @ coef_a
            res_b = b - sub @ coef_b
        else:
            res_a, res_b = a, b
        den = np.sum(res_a * res_a, axis=0)
        cross = res_b.T @ res_a
        num = np.sum(cross * cross, axis=0)
        active = den > 1e-12 * den_init
        active[selected] = False
        if not active.any():
            exhausted = True
            break
        if num[active].max() <= 1e-12 * target_energy * den[active].max():
            reconstructed = True
            break
        ratio = np.where(active, num / np.where(den > 0, den, 1.0), -np.inf)
        pick = int(np.argmax(ratio))
        gains.append(float(num[pick] / den[pick]))
        selected.append(pick)
    return SelectionResult(
        indices=selected,
        gains=gains,
        exhausted=exhausted,
        target_reconstructed=reconstructed,
    )


@dataclass(frozen=True)
class EvalReport:
    """Outcome of evaluating one selection on one matrix."""

    method: str
    indices: list[int]
    error: float
    accuracy: float | None
    duration: float
    seed: int
    parameters: dict = field(default_factory=dict)


def evaluate_selection(
    a: np.ndarray,
    indices,
    method: str = "eval",
    uniform_trials: int = 10,
    seed: int = 0,
) -> EvalReport:
    """Package a selection's error and relative accuracy into a report."""
    started = time.perf_counter()
    error = reconstruction_error(a, indices)
    accuracy = relative_accuracy(a, indices, uniform_trials=uniform_trials, seed=seed)
    return EvalReport(
        method=method,
        indices=[int(i) for i in indices],
        error=error,
        accuracy=accuracy,
        duration=time.perf_counter() - started,
        seed=seed,
        parameters={"l": len(indices), "trials": uniform_trials},
    )
