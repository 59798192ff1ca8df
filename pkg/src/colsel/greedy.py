"""Greedy column selection by Frobenius reconstruction error.

Selects columns one at a time, each step taking the candidate with the
largest error decrease.  The per-candidate scores are maintained by
rank-one recursions, so neither the residual matrix nor its inner-product
matrix is ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["SelectionState", "SelectionResult", "init_state", "select_next", "greedy_select"]

# Candidate columns whose residual squared norm falls below this fraction
# of their original squared norm are dropped from consideration; selecting
# them would divide by a vanishing denominator.
DEACTIVATION_TOLERANCE = 1e-12


class ExhaustedError(RuntimeError):
    """No selectable candidate columns remain."""


@dataclass
class SelectionState:
    """Mutable per-run state of the greedy selection.

    ``score_num[i] / score_den[i]`` is the decrease in reconstruction error
    obtained by selecting column ``i`` next.  ``gram_factors`` holds one
    vector per past selection; their outer products sum to the explained
    part of the residual inner-product matrix, which is all the recursions
    need to stay consistent without storing residuals.
    """

    score_num: np.ndarray
    score_den: np.ndarray
    den_init: np.ndarray
    active: np.ndarray
    gram_factors: list[np.ndarray] = field(default_factory=list)
    selected: list[int] = field(default_factory=list)
    gains: list[float] = field(default_factory=list)

    def deactivate_spent(self) -> None:
        self.active &= self.score_den > DEACTIVATION_TOLERANCE * self.den_init


def _gram_column_norms_sq(a: np.ndarray, block: int = 128) -> np.ndarray:
    """Squared norms of the columns of ``a.T @ a``, computed block-wise.

    Avoids holding the full n-by-n product for wide matrices.
    """
    n = a.shape[1]
    out = np.empty(n)
    for start in range(0, n, block):
        stop = min(start + block, n)
        cols = a.T @ a[:, start:stop]
        out[start:stop] = np.sum(cols * cols, axis=0)
    return out


def init_state(a: np.ndarray) -> SelectionState:
    """Initial scores: num from the Gram column norms, den from column norms."""
    den = np.sum(a * a, axis=0)
    if not np.any(den > 0.0):
        raise ValueError("matrix has no nonzero columns; nothing to select")
    num = _gram_column_norms_sq(a)
    active = den > DEACTIVATION_TOLERANCE * den.max()
    return SelectionState(
        score_num=num, score_den=den, den_init=den.copy(), active=active
    )


def select_next(state: SelectionState, a: np.ndarray) -> int:
    """Select the best remaining column and update all candidate scores.

    Returns the selected column index.  Ties are broken toward the
    smallest index (argmax returns the first maximum).
    """
    if not np.any(state.active):
        raise ExhaustedError("no active candidate columns remain")
    ratio = np.full(state.score_num.shape, -np.inf)
    np.divide(state.score_num, state.score_den, out=ratio, where=state.active)
    p = int(np.argmax(ratio))

    gram_col = a.T @ a[:, p]
    for w in state.gram_factors:
        gram_col = gram_col - w[p] * w
    pivot = gram_col[p]
    if pivot <= DEACTIVATION_TOLERANCE * state.den_init[p]:
        raise ValueError(
            f"column {p} is numerically dependent on the current selection"
        )
    w_new = gram_col / np.sqrt(pivot)

    state.gains.append(float(state.score_num[p] / state.score_den[p]))

    corr = a.T @ (a @ w_new)
    for w in state.gram_factors:
        corr = corr - (w @ w_new) * w
    state.score_num = state.score_num - 2.0 * w_new * corr + (w_new @ w_new) * (w_new * w_new)
    state.score_den = state.score_den - w_new * w_new

    state.gram_factors.append(w_new)
    state.selected.append(p)
    state.active[p] = False
    state.deactivate_spent()
    return p


@dataclass(frozen=True)
class SelectionResult:
    """Selected column indices in selection order, with per-step error decreases."""

    indices: list[int]
    gains: list[float]
    exhausted: bool = False
    target_reconstructed: bool = False


def greedy_select(a: np.ndarray, l: int) -> SelectionResult:
    """Greedily select ``l`` columns of ``a`` minimizing reconstruction error.

    If the matrix runs out of independent columns early, the result holds
    fewer indices and the exhausted flag is set; indices are never padded.
    """
    n = a.shape[1]
    if l < 1 or l > n:
        raise ValueError(f"budget l must satisfy 1 <= l <= {n}, got {l}")
    state = init_state(a)
    exhausted = False
    for _ in range(l):
        if not np.any(state.active):
            exhausted = True
            break
        select_next(state, a)
    return SelectionResult(
        indices=list(state.selected), gains=list(state.gains), exhausted=exhausted
    )
