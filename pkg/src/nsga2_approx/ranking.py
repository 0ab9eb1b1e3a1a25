"""Non-dominated sorting and crowding distance.

Crowding distances are computed from integer objective gaps and combined over
a common denominator, ``(g1*r2 + g2*r1) / (r1*r2)``, so that equal distances
compare equal as floats and random tie-breaking sees every genuine tie.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import Individual, RngHandle, strictly_dominates

INF = math.inf


@dataclass
class FrontPartition:
    """Fronts ``F_1, F_2, ...``; each front lists its members in input order."""

    fronts: list[list[Individual]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.fronts)

    def __iter__(self):
        return iter(self.fronts)

    def __getitem__(self, i) -> list[Individual]:
        return self.fronts[i]

    def id_sets(self) -> list[frozenset[int]]:
        return [frozenset(ind.id for ind in f) for f in self.fronts]

    def critical_index(self, capacity: int) -> int:
        """0-based index ``i*`` of the first front where the cumulative size reaches ``capacity``."""
        total = 0
        for i, front in enumerate(self.fronts):
            total += len(front)
            if total >= capacity:
                return i
        raise ValueError(f"only {total} individuals, cannot fill capacity {capacity}")


def non_dominated_sort(R: Sequence[Individual]) -> FrontPartition:
    """Fast non-dominated sort; sets ``rank`` (1-based front index) on every member."""
    m = len(R)
    if m == 0:
        return FrontPartition()
    objs = [ind.objectives for ind in R]
    dominated_by_me: list[list[int]] = [[] for _ in range(m)]
    n_dominators = [0] * m
    for p in range(m):
        for q in range(p + 1, m):
            if strictly_dominates(objs[p], objs[q]):
                dominated_by_me[p].append(q)
                n_dominators[q] += 1
            elif strictly_dominates(objs[q], objs[p]):
                dominated_by_me[q].append(p)
                n_dominators[p] += 1
    fronts: list[list[int]] = []
    current = [p for p in range(m) if n_dominators[p] == 0]
    while current:
        fronts.append(sorted(current))
        nxt = []
        for p in current:
            for q in dominated_by_me[p]:
                n_dominators[q] -= 1
                if n_dominators[q] == 0:
                    nxt.append(q)
        current = nxt
    partition = FrontPartition()
    for rank, front in enumerate(fronts, start=1):
        members = [R[i] for i in front]
        for ind in members:
            ind.rank = rank
        partition.fronts.append(members)
    return partition


def peel_fronts(R: Sequence[Individual]) -> list[frozenset[int]]:
    """Brute-force reference: repeatedly strip the non-dominated set (ids only)."""
    remaining = list(R)
    fronts = []
    while remaining:
        front = [
            a for a in remaining
            if not any(strictly_dominates(b.objectives, a.objectives) for b in remaining)
        ]
        fronts.append(frozenset(a.id for a in front))
        remaining = [a for a in remaining if a.id not in fronts[-1]]
    return fronts


def sorted_by_objective(front: Sequence[Individual], k: int) -> list[Individual]:
    """Descending objective ``k``; equal values by ascending id."""
    return sorted(front, key=lambda ind: (-ind.objectives[k], ind.id))


def combine_gaps(g1: int, r1: int, g2: int, r2: int) -> float:
    """``g1/r1 + g2/r2`` as one correctly rounded division; zero ranges contribute 0."""
    if r1 > 0 and r2 > 0:
        return (g1 * r2 + g2 * r1) / (r1 * r2)
    if r1 > 0:
        return g1 / r1
    if r2 > 0:
        return g2 / r2
    return 0.0


@dataclass
class CrowdingAssignment:
    values: dict[int, float]
    orders: tuple[list[int], list[int]]

    def __getitem__(self, ind_id: int) -> float:
        return self.values[ind_id]


def crowding_distance(front: Sequence[Individual], rng: RngHandle | None = None) -> CrowdingAssignment:
    """Crowding distance of every member of ``front``; sets ``cdis`` in place.

    Each objective sorts the front by descending value (ties by ascending id);
    the two ends get ``+inf`` and inner members the neighbour gap divided by
    the objective's range.  A zero range contributes nothing.  ``rng`` is
    accepted for interface symmetry and not consumed.
    """
    if not front:
        raise ValueError("crowding distance of an empty front")
    size = len(front)
    infinite = [False] * size
    gaps = [[0, 0] for _ in range(size)]
    ranges = [0, 0]
    pos = {ind.id: i for i, ind in enumerate(front)}
    orders = []
    for k in (0, 1):
        order = sorted_by_objective(front, k)
        orders.append([ind.id for ind in order])
        infinite[pos[order[0].id]] = True
        infinite[pos[order[-1].id]] = True
        ranges[k] = order[0].objectives[k] - order[-1].objectives[k]
        for j in range(1, size - 1):
            gaps[pos[order[j].id]][k] = order[j - 1].objectives[k] - order[j + 1].objectives[k]
    values = {}
    for i, ind in enumerate(front):
        d = INF if infinite[i] else combine_gaps(gaps[i][0], ranges[0], gaps[i][1], ranges[1])
        ind.cdis = d
        values[ind.id] = d
    return CrowdingAssignment(values, (orders[0], orders[1]))


def assign_crowding(partition: FrontPartition, upto: int | None = None) -> None:
    """Crowding distance for fronts ``0..upto`` (all fronts when ``upto`` is None)."""
    last = len(partition) - 1 if upto is None else upto
    for front in partition.fronts[: last + 1]:
        crowding_distance(front)
