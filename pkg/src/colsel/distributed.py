"""Two-phase partitioned selection with a shared sketched target.

Shaped like a map/reduce job run in-process: every partition independently
selects columns that reconstruct the shared sketch, then a single reduce
step selects the final columns from the union of the per-partition picks.
Only the picked columns cross the phase boundary; the report tracks that
data movement along with the sketch broadcast cost.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .generalized import generalized_select
from .greedy import SelectionResult, greedy_select
from .linalg import frobenius_sq, orthonormal_basis, reconstruction_error
from .sketch import SketchSpec, sketch_partitioned

__all__ = [
    "DistributedConfig",
    "Partition",
    "PartitionResult",
    "DistributedReport",
    "partition_columns",
    "map_phase",
    "reduce_phase",
    "distributed_select",
    "naive_distributed_baseline",
]

ASSIGNMENTS = ("contiguous", "round-robin")


@dataclass(frozen=True)
class DistributedConfig:
    """Partitioning, budgets and sketch parameters for one pipeline run.

    The sketch may be omitted only for the naive baseline, which never
    builds a shared target.
    """

    partitions: int
    budget: int
    sketch: SketchSpec | None
    assignment: str = "contiguous"
    per_partition_budget: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.partitions < 1:
            raise ValueError(f"partition count must be >= 1, got {self.partitions}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.assignment not in ASSIGNMENTS:
            raise ValueError(
                f"unknown assignment {self.assignment!r}, expected one of {ASSIGNMENTS}"
            )
        if (
            self.per_partition_budget is not None
            and self.partitions * self.per_partition_budget < self.budget
        ):
            raise ValueError(
                "per-partition budget too small: the union of picks could not "
                f"reach the global budget ({self.partitions} * "
                f"{self.per_partition_budget} < {self.budget})"
            )

    def resolved_partition_budget(self) -> int:
        # Ceiling, not floor: with the floor the union of per-partition picks
        # can fall short of the global budget whenever it is not divisible.
        if self.per_partition_budget is not None:
            return self.per_partition_budget
        return math.ceil(self.budget / self.partitions)


@dataclass(frozen=True)
class Partition:
    """One column block of the input matrix with its global index map."""

    pid: int
    matrix: np.ndarray
    global_indices: np.ndarray


@dataclass(frozen=True)
class PartitionResult:
    """Columns one partition emits to the reduce phase."""

    pid: int
    local_indices: list[int]
    global_indices: list[int]
    columns: np.ndarray
    exhausted: bool
    target_reconstructed: bool


def partition_columns(a: np.ndarray, c: int, assignment: str = "contiguous") -> list[Partition]:
    """Split the columns of ``a`` into ``c`` blocks that tile them exactly once."""
    n = a.shape[1]
    if c < 1 or c > n:
        raise ValueError(f"cannot split {n} columns into {c} partitions")
    if assignment not in ASSIGNMENTS:
        raise ValueError(
            f"unknown assignment {assignment!r}, expected one of {ASSIGNMENTS}"
        )
    parts = []
    if assignment == "contiguous":
        base, extra = divmod(n, c)
        start = 0
        for pid in range(c):
            size = base + (1 if pid < extra else 0)
            idx = np.arange(start, start + size)
            parts.append(Partition(pid, np.asfortranarray(a[:, idx]), idx))
            start += size
    else:
        for pid in range(c):
            idx = np.arange(pid, n, c)
            parts.append(Partition(pid, np.asfortranarray(a[:, idx]), idx))
    return parts


def map_phase(partition: Partition, b: np.ndarray, l_b: int) -> PartitionResult:
    """Select up to ``l_b`` columns of one partition against the shared target."""
    if partition.matrix.shape[0] != b.shape[0]:
        raise ValueError(
            f"row mismatch: partition has {partition.matrix.shape[0]} rows, "
            f"target has {b.shape[0]}"
        )
    width = partition.matrix.shape[1]
    res = generalized_select(partition.matrix, b, min(l_b, width))
    return PartitionResult(
        pid=partition.pid,
        local_indices=list(res.indices),
        global_indices=[int(partition.global_indices[j]) for j in res.indices],
        columns=np.asfortranarray(partition.matrix[:, res.indices]),
        exhausted=res.exhausted,
        target_reconstructed=res.target_reconstructed,
    )


def reduce_phase(
    results: list[PartitionResult], b: np.ndarray, l: int
) -> tuple[SelectionResult, list[int], np.ndarray]:
    """Final selection over the union of per-partition picks.

    Returns the selection over the concatenated candidates, the winners'
    global indices, and the winners' column data.  If the union holds
    fewer than ``l`` columns, everything selectable is returned and the
    exhausted flag is set.
    """
    if not results:
        raise ValueError("reduce phase needs at least one partition result")
    ordered = sorted(results, key=lambda r: r.pid)
    union_globals: list[int] = []
    seen: set[int] = set()
    for res in ordered:
        for g in res.global_indices:
            if g in seen:
                raise ValueError(f"global column {g} emitted by multiple partitions")
            seen.add(g)
        union_globals.extend(res.global_indices)
    if not union_globals:
        raise ValueError("no candidate columns reached the reduce phase")
    candidates = np.asfortranarray(
        np.concatenate([r.columns for r in ordered], axis=1)
    )
    k = candidates.shape[1]
    selection = generalized_select(candidates, b, min(l, k))
    if k < l:
        selection = SelectionResult(
            indices=selection.indices,
            gains=selection.gains,
            exhausted=True,
            target_reconstructed=selection.target_reconstructed,
        )
    winners = [union_globals[j] for j in selection.indices]
    data = np.asfortranarray(candidates[:, selection.indices])
    return selection, winners, data


@dataclass(frozen=True)
class DistributedReport:
    """Selection outcome plus the cost accounting of one pipeline run.

    ``columns_moved`` counts the column vectors crossing the map/reduce
    boundary; ``broadcast_values`` counts the shared-sketch values sent to
    every partition, mirroring a cluster's network cost even though the
    in-process sketch is shared by reference.
    """

    selected: list[int]
    target_error: float
    exact_error: float
    per_partition_picks: list[int]
    columns_moved: int
    broadcast_values: int
    map_exhausted: list[bool]
    reduce_exhausted: bool
    target_reconstructed: bool
    timings: dict[str, float] = field(default_factory=dict)


def _target_error(columns: np.ndarray, b: np.ndarray) -> float:
    q = orthonormal_basis(columns, range(columns.shape[1]))
    return frobenius_sq(b - q @ (q.T @ b))


def distributed_select(
    a: np.ndarray, config: DistributedConfig, threads: int | None = None
) -> DistributedReport:
    """Run the full pipeline: sketch, per-partition selection, reduce.

    Map tasks run on a thread pool and share only immutable inputs; results
    are combined in partition order, so the outcome does not depend on the
    pool size.
    """
    if config.sketch is None:
        raise ValueError("distributed selection requires a sketch spec")
    l_b = config.resolved_partition_budget()
    t0 = time.perf_counter()
    parts = partition_columns(a, config.partitions, config.assignment)
    b = sketch_partitioned([(p.matrix, p.global_indices) for p in parts], config.sketch)
    t_sketch = time.perf_counter()

    if threads is not None and threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    if threads == 1 or len(parts) == 1:
        map_results = [map_phase(p, b, l_b) for p in parts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            map_results = list(pool.map(lambda p: map_phase(p, b, l_b), parts))
    map_results.sort(key=lambda r: r.pid)
    t_map = time.perf_counter()

    selection, winners, data = reduce_phase(map_results, b, config.budget)
    t_reduce = time.perf_counter()

    picks = [len(r.global_indices) for r in map_results]
    columns_moved = sum(picks)
    if columns_moved > config.partitions * l_b:
        raise AssertionError("map phase emitted more columns than its budget allows")
    return DistributedReport(
        selected=winners,
        target_error=_target_error(data, b),
        exact_error=reconstruction_error(a, winners),
        per_partition_picks=picks,
        columns_moved=columns_moved,
        broadcast_values=config.partitions * a.shape[0] * config.sketch.r,
        map_exhausted=[r.exhausted for r in map_results],
        reduce_exhausted=selection.exhausted,
        target_reconstructed=selection.target_reconstructed,
        timings={
            "sketch": t_sketch - t0,
            "map": t_map - t_sketch,
            "reduce": t_reduce - t_map,
            "total": t_reduce - t0,
        },
    )


def naive_distributed_baseline(a: np.ndarray, config: DistributedConfig) -> list[int]:
    """Per-partition selection without a shared target, then a greedy reduction.

    Each partition greedily approximates only its own block, which is the
    failure mode the shared sketch avoids: locally dominant columns win
    even when they are globally irrelevant.
    """
    l_b = config.resolved_partition_budget()
    parts = partition_columns(a, config.partitions, config.assignment)
    union_globals: list[int] = []
    union_blocks: list[np.ndarray] = []
    for part in parts:
        width = part.matrix.shape[1]
        res = greedy_select(part.matrix, min(l_b, width))
        union_globals.extend(int(part.global_indices[j]) for j in res.indices)
        union_blocks.append(part.matrix[:, res.indices])
    candidates = np.asfortranarray(np.concatenate(union_blocks, axis=1))
    k = candidates.shape[1]
    final = greedy_select(candidates, min(config.budget, k))
    return [union_globals[j] for j in final.indices]
