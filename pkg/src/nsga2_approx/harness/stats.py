"""Nearest-rank quartiles and steady-state block summaries."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def nearest_rank(sorted_samples: Sequence[int], q: float) -> int:
    """Element at 1-based rank ``ceil(q * m)`` (at least 1) of an ascending sample."""
    m = len(sorted_samples)
    if m == 0:
        raise ValueError("nearest rank of an empty sample")
    k = max(1, math.ceil(q * m - 1e-12))
    return int(sorted_samples[k - 1])


@dataclass(frozen=True)
class QuartileSummary:
    q1: int
    q2: int
    q3: int
    samples: int
    variant: str = ""
    N: int = 0
    window: str = ""

    def triple(self) -> tuple[int, int, int]:
        return self.q1, self.q2, self.q3


def quartiles(samples: Sequence[int], **setting) -> QuartileSummary:
    """Nearest-rank quartiles at ranks ``ceil(m/4)``, ``ceil(m/2)``, ``ceil(3m/4)``."""
    s = sorted(int(v) for v in samples)
    if not s:
        raise ValueError("quartiles of an empty sample")
    return QuartileSummary(nearest_rank(s, 0.25), nearest_rank(s, 0.5), nearest_rank(s, 0.75), len(s), **setting)


@dataclass(frozen=True)
class BlockStats:
    block: int
    length: int
    min: int
    median: int
    max: int
    partial: bool


def steady_state_block_stats(mei_post_t0: Sequence[int], N: int) -> list[BlockStats]:
    """Split post-``t0`` iterations ``g = 1, 2, ...`` into blocks ``ceil(g/N)``.

    ``mei_post_t0[0]`` is iteration 1.  The median is the nearest-rank median;
    a short final block is kept and flagged ``partial``.
    """
    if N < 1:
        raise ValueError("block length N must be >= 1")
    values = np.asarray(mei_post_t0, dtype=np.int64)
    out = []
    for b, start in enumerate(range(0, len(values), N), start=1):
        chunk = np.sort(values[start:start + N])
        out.append(BlockStats(b, len(chunk), int(chunk[0]), nearest_rank(chunk, 0.5), int(chunk[-1]), len(chunk) < N))
    return out
