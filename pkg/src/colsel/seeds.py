"""Deterministic sub-seed derivation.

A single master seed drives every stochastic component.  Sub-seeds are
derived with a splitmix64-style mixer so that any consumer (a sketch row,
an evaluation trial, a nested SVD) can regenerate its stream from the
master seed and a stable label, independent of call order.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _encode(part) -> int:
    if isinstance(part, str):
        digest = hashlib.blake2b(part.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    return int(part) & _MASK64


def derive_seed(master: int, *parts) -> int:
    """Mix a master seed with integer or string labels into a new 64-bit seed."""
    state = _mix64((master & _MASK64) ^ _GOLDEN)
    for part in parts:
        state = _mix64((state + _GOLDEN) ^ _encode(part))
    return state


def column_seed(master: int, index: int) -> int:
    """Seed for the random-projection row of one global column index.

    Depends only on (master, index), so the same row can be regenerated on
    any partition or thread without materializing the projection matrix.
    """
    return _mix64((master + (index + 1) * _GOLDEN) & _MASK64)
