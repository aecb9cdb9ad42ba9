"""Windowed co-occurrence counts from a walk corpus."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels


@dataclass(frozen=True, eq=False)
class CooccurrenceMatrix:
    entries: np.ndarray  # (n, n) int64, symmetric
    window: tuple

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    @property
    def total(self) -> int:
        return int(self.entries.sum())


def window_pairs(r: int, l: int, t_lo: int, t_hi: int) -> int:
    """Exact total of C for r walks of length l: 2 r sum_t (l - t)."""
    return 2 * r * sum(l - t for t in range(t_lo, t_hi + 1))


def accumulate(corpus, t_lo: int, t_hi: int, n: int | None = None) -> CooccurrenceMatrix:
    """Count ordered pairs (w_k, w_{k+t}) for t_lo <= t <= t_hi, then symmetrise.

    ``corpus`` may be a WalkCorpus or a plain (r, l) integer array. ``n``
    defaults to one more than the largest node id present.
    """
    walks = np.ascontiguousarray(getattr(corpus, "walks", corpus), dtype=np.int64)
    if walks.ndim != 2:
        raise ValueError("walks must be a 2-d array")
    l = walks.shape[1]
    if not 1 <= t_lo <= t_hi <= l - 1:
        raise ValueError(f"window [{t_lo}, {t_hi}] out of range for walk length {l}")
    if n is None:
        n = int(walks.max()) + 1 if walks.size else 0
    counts = kernels.pair_counts_kernel(walks, n, t_lo, t_hi)
    return CooccurrenceMatrix(counts + counts.T, (t_lo, t_hi))


def merge(c1: CooccurrenceMatrix, c2: CooccurrenceMatrix) -> CooccurrenceMatrix:
    if c1.entries.shape != c2.entries.shape:
        raise ValueError("cannot merge co-occurrence matrices of different shape")
    if tuple(c1.window) != tuple(c2.window):
        raise ValueError("cannot merge co-occurrence matrices with different windows")
    return CooccurrenceMatrix(c1.entries + c2.entries, tuple(c1.window))


def zeros(n: int, window) -> CooccurrenceMatrix:
    return CooccurrenceMatrix(np.zeros((n, n), dtype=np.int64), tuple(window))


def write_csv(C: CooccurrenceMatrix, path) -> None:
    """Upper triangle (diagonal included) as ``i,j,count`` rows, sorted."""
    i, j = np.nonzero(np.triu(C.entries))
    lines = ["i,j,count"] + [f"{a},{b},{C.entries[a, b]}" for a, b in zip(i, j)]
    Path(path).write_text("\n".join(lines) + "\n")
