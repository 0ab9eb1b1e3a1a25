"""Mating selection and mutation."""
from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

from .core import ConfigurationError, Genome, Individual, Population, RngHandle


class MatingScheme(str, enum.Enum):
    FAIR = "fair"
    RANDOM = "random"
    TOURNAMENT = "tournament"


class MutationOp(str, enum.Enum):
    ONE_BIT = "one-bit"
    BIT_WISE = "bitwise"


def tournament_winner(a: Individual, b: Individual, rng: RngHandle) -> Individual:
    """Lower rank wins, then larger crowding distance, then a fair coin."""
    if a.rank is None or b.rank is None or a.cdis is None or b.cdis is None:
        raise ValueError("binary tournament needs rank and cdis on both contestants")
    if a.rank != b.rank:
        return a if a.rank < b.rank else b
    if a.cdis != b.cdis:
        return a if a.cdis > b.cdis else b
    return b if rng.coin() else a


def select_parents(P: Population | Sequence[Individual], scheme: MatingScheme, count: int,
                   rng: RngHandle) -> list[Individual]:
    members = list(P)
    N = len(members)
    scheme = MatingScheme(scheme)
    if count < 1:
        raise ConfigurationError("parent count must be positive")
    if scheme is MatingScheme.FAIR:
        if count != N:
            raise ConfigurationError(f"fair selection produces exactly N={N} parents, asked for {count}")
        return members
    if scheme is MatingScheme.RANDOM:
        return [members[rng.below(N)] for _ in range(count)]
    parents = []
    for _ in range(count):
        a = members[rng.below(N)]
        b = members[rng.below(N)]
        parents.append(tournament_winner(a, b, rng))
    return parents


def flip_positions(n: int, op: MutationOp, rng: RngHandle) -> list[int]:
    """Positions flipped by one application of ``op`` to a length-``n`` genome.

    Bit-wise mutation with rate ``1/n`` jumps between flipped positions with
    geometrically distributed gaps, so it costs one draw per flip plus one.
    """
    if MutationOp(op) is MutationOp.ONE_BIT:
        return [rng.below(n)]
    if n == 1:
        return [0]
    log_q = math.log1p(-1.0 / n)
    flips = []
    pos = -1
    while True:
        skip = math.log1p(-rng.random()) / log_q
        if skip >= n - 1 - pos:
            return flips
        pos += math.floor(skip) + 1
        flips.append(pos)


def mutate(x: Genome, op: MutationOp, rng: RngHandle) -> Genome:
    """Mutated copy of ``x``; the input genome is left untouched."""
    y = np.array(x, dtype=np.uint8)
    for i in flip_positions(len(x), op, rng):
        y[i] ^= 1
    y.setflags(write=False)
    return y
