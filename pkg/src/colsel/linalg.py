"""Dense-matrix primitives shared by all selection algorithms.

Matrices are plain float64 numpy arrays in column-major (Fortran) layout,
validated once at construction time by :func:`as_matrix`.  All operations
here are pure functions of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "DegenerateBasisError",
    "SvdResult",
    "as_matrix",
    "check_column_set",
    "frobenius_sq",
    "orthonormal_basis",
    "project_onto_columns",
    "reconstruction_error",
    "embed_columns",
    "rank_k_column_approx",
    "approx_svd_from_columns",
    "randomized_svd",
]

# A basis column whose residual against the previously orthogonalized
# columns falls below this fraction of its original norm is treated as
# linearly dependent.  Scale-invariant; shared with the greedy module's
# candidate-deactivation rule.
RANK_TOLERANCE = 1e-12


class DegenerateBasisError(ValueError):
    """Selected columns are numerically rank deficient."""

    def __init__(self, indices):
        self.indices = list(indices)
        super().__init__(
            "columns %s are numerically dependent on the other selected columns"
            % (self.indices,)
        )


def as_matrix(values) -> np.ndarray:
    """Validate and convert input to a float64, column-major 2-D array.

    This is the single checkpoint for entry validation: rejects empty
    shapes and non-finite entries so downstream operations can assume
    clean data.
    """
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got {a.ndim}-D input")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be at least 1x1, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite (no NaN or Inf)")
    return np.asfortranarray(a)


def check_column_set(columns: Sequence[int], n_cols: int) -> list[int]:
    """Validate a column index set: integer, distinct, within range."""
    out = [int(i) for i in columns]
    if len(set(out)) != len(out):
        raise ValueError(f"column indices must be distinct, got {out}")
    for i in out:
        if i < 0 or i >= n_cols:
            raise ValueError(f"column index {i} out of range for {n_cols} columns")
    return out


def frobenius_sq(a: np.ndarray) -> float:
    """Squared Frobenius norm."""
    return float(np.sum(a * a))


def orthonormal_basis(a: np.ndarray, columns: Sequence[int]) -> np.ndarray:
    """Orthonormal basis Q for the span of the selected columns of ``a``.

    Raises :class:`DegenerateBasisError` naming the offending indices when
    the selected columns are numerically rank deficient.
    """
    cols = check_column_set(columns, a.shape[1])
    if not cols:
        raise ValueError("cannot build a basis from an empty column set")
    sub = a[:, cols]
    m = a.shape[0]
    if len(cols) > m:
        raise DegenerateBasisError(cols[m:])
    q, r = np.linalg.qr(sub)
    col_norms = np.sqrt(np.sum(sub * sub, axis=0))
    diag = np.abs(np.diag(r))
    bad = np.flatnonzero(diag <= RANK_TOLERANCE * col_norms)
    if bad.size:
        raise DegenerateBasisError([cols[j] for j in bad])
    return q


def project_onto_columns(
    a: np.ndarray, columns: Sequence[int], x: np.ndarray
) -> np.ndarray:
    """Project the columns of ``x`` onto the span of the selected columns of ``a``.

    Computed via an orthogonal basis and a least-squares style solve; the
    full projector matrix is never formed.
    """
    if x.shape[0] != a.shape[0]:
        raise ValueError(
            f"row mismatch: matrix has {a.shape[0]} rows, input has {x.shape[0]}"
        )
    q = orthonormal_basis(a, columns)
    return q @ (q.T @ x)


def reconstruction_error(a: np.ndarray, columns: Sequence[int]) -> float:
    """Squared Frobenius error of ``a`` after projection onto the selected columns.

    The empty selection yields the squared Frobenius norm of ``a``.
    """
    cols = check_column_set(columns, a.shape[1])
    if not cols:
        return frobenius_sq(a)
    residual = a - project_onto_columns(a, cols, a)
    return frobenius_sq(residual)


def embed_columns(a: np.ndarray, columns: Sequence[int]) -> np.ndarray:
    """Coordinates of every column of ``a`` in the selected columns' subspace."""
    q = orthonormal_basis(a, columns)
    return q.T @ a


def rank_k_column_approx(a: np.ndarray, columns: Sequence[int], k: int) -> np.ndarray:
    """Best rank-``k`` approximation of ``a`` within the selected columns' span.

    Three steps: orthonormal basis, embedding, truncated SVD of the
    embedded columns mapped back through the basis.
    """
    cols = check_column_set(columns, a.shape[1])
    if k < 1 or k > len(cols):
        raise ValueError(f"rank k must satisfy 1 <= k <= {len(cols)}, got {k}")
    q = orthonormal_basis(a, cols)
    w = q.T @ a
    u, s, vt = np.linalg.svd(w, full_matrices=False)
    w_k = (u[:, :k] * s[:k]) @ vt[:k]
    return q @ w_k


@dataclass(frozen=True)
class SvdResult:
    """Truncated singular value decomposition, factors with orthonormal columns."""

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray


def approx_svd_from_columns(
    a: np.ndarray, columns: Sequence[int], k: int
) -> SvdResult:
    """Approximate the leading ``k`` singular triplets of ``a`` from selected columns.

    The left vectors come from rotating the embedded columns' singular
    vectors back through the orthonormal basis.
    """
    cols = check_column_set(columns, a.shape[1])
    if k < 1 or k > len(cols):
        raise ValueError(f"rank k must satisfy 1 <= k <= {len(cols)}, got {k}")
    q = orthonormal_basis(a, cols)
    w = q.T @ a
    u, s, vt = np.linalg.svd(w, full_matrices=False)
    return SvdResult(u=q @ u[:, :k], singular_values=s[:k].copy(), v=vt[:k].T.copy())


def randomized_svd(
    a: np.ndarray,
    k: int,
    oversample: int = 10,
    power_iters: int = 2,
    seed: int = 0,
) -> SvdResult:
    """Randomized truncated SVD (range finder with power iterations).

    Deterministic for a fixed seed.  Used by evaluation metrics and
    baselines when an exact decomposition would be too expensive.
    """
    m, n = a.shape
    if k < 1 or k > min(m, n):
        raise ValueError(f"rank k must satisfy 1 <= k <= {min(m, n)}, got {k}")
    rng = np.random.default_rng(seed)
    width = min(k + max(oversample, 0), min(m, n))
    probe = rng.standard_normal((n, width))
    q, _ = np.linalg.qr(a @ probe)
    for _ in range(max(power_iters, 0)):
        q, _ = np.linalg.qr(a.T @ q)
        q, _ = np.linalg.qr(a @ q)
    b = q.T @ a
    u, s, vt = np.linalg.svd(b, full_matrices=False)
    return SvdResult(
        u=q @ u[:, :k], singular_values=s[:k].copy(), v=vt[:k].T.copy()
    )
