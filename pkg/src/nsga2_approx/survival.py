"""Survival selection: shrink a combined population back to capacity.

Three engines share one contract.  Fronts before the critical front ``F_i*``
are kept whole, fronts after it are dropped, and ``F_i*`` loses the surplus.
The engines differ in how ``F_i*`` is thinned:

* :func:`select_classic` ranks by the crowding distance computed once up front,
* :func:`select_current_cd` removes one individual at a time and refreshes the
  crowding distance of the removed individual's list neighbours,
* :func:`select_steady_state` removes a single individual from ``N + 1``.

Random tie-breaking uses a per-individual ``tie_key`` drawn from the run's
RNG for every member of ``F_i*`` (in combined-population order) at the start
of each selection.  Keys are compared as ``(cdis, tie_key, position)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import Individual, Population, RngHandle
from .ranking import INF, FrontPartition, combine_gaps, crowding_distance
from .structures import NIL, IndexedHeap, SortedLinkedList

SENTINEL_KEY = (-1.0, -1.0, -1)


@dataclass
class RemovalTrace:
    """Removed ids with their crowding distance at the moment of removal.

    Individuals dropped with a dominated front carry ``None``.
    """

    entries: list[tuple[int, float | None]] = field(default_factory=list)
    queue_ops: int = 0
    sift_steps: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def removed_ids(self) -> list[int]:
        return [i for i, _ in self.entries]

    def critical_cdis(self) -> list[float]:
        return [d for _, d in self.entries if d is not None]


@dataclass
class _Plan:
    kept: list[Individual]
    critical: list[Individual]
    discarded: list[Individual]
    n_remove: int


def _plan(R: Sequence[Individual], N: int, partition: FrontPartition,
          rng: RngHandle | None, tie_keys: Mapping[int, float] | None) -> _Plan:
    if len(R) < N:
        raise ValueError(f"combined population of size {len(R)} cannot fill capacity {N}")
    istar = partition.critical_index(N)
    for front in partition.fronts[: istar + 1]:
        crowding_distance(front)
    kept = [ind for front in partition.fronts[:istar] for ind in front]
    critical = list(partition.fronts[istar])
    discarded = [ind for front in partition.fronts[istar + 1:] for ind in front]
    for ind in critical:
        if tie_keys is not None:
            ind.tie_key = tie_keys[ind.id]
        elif rng is not None:
            ind.tie_key = rng.random()
        else:
            raise ValueError("need an rng or explicit tie keys")
    return _Plan(kept, critical, discarded, len(kept) + len(critical) - N)


def _finish(R: Sequence[Individual], N: int, plan: _Plan, removed: list[tuple[int, float]],
            trace: RemovalTrace) -> tuple[Population, RemovalTrace]:
    trace.entries = [(ind.id, None) for ind in plan.discarded] + removed
    gone = {i for i, _ in trace.entries}
    survivors = [ind for ind in R if ind.id not in gone]
    assert len(survivors) == N
    return Population(survivors, N), trace


def select_classic(R: Sequence[Individual], N: int, partition: FrontPartition, rng: RngHandle | None = None,
                   tie_keys: Mapping[int, float] | None = None) -> tuple[Population, RemovalTrace]:
    """Drop the surplus of ``F_i*`` with the smallest initial crowding distance."""
    plan = _plan(R, N, partition, rng, tie_keys)
    order = sorted(range(len(plan.critical)),
                   key=lambda i: (plan.critical[i].cdis, plan.critical[i].tie_key, i))
    removed = [(plan.critical[i].id, plan.critical[i].cdis) for i in order[: plan.n_remove]]
    return _finish(R, N, plan, removed, RemovalTrace())


class SelectionWorkspace:
    """Priority queue plus one sorted linked list per objective over ``F_i*``.

    Handles are positions in ``front``.  Queue keys are
    ``(current cdis, tie_key, handle)``.
    """

    def __init__(self, front: Sequence[Individual]):
        self.front = list(front)
        r = len(self.front)
        self.values = [[ind.objectives[k] for ind in self.front] for k in (0, 1)]
        self.lists = []
        for k in (0, 1):
            order = sorted(range(r), key=lambda i: (-self.values[k][i], self.front[i].id))
            self.lists.append(SortedLinkedList(order, r))
        self.ranges = self._ranges()
        self.heap = IndexedHeap(r, SENTINEL_KEY)
        self.heap.build(range(r), [self._key(i) for i in range(r)])
        self.rebuilds = 0

    def _ranges(self) -> list[int]:
        return [self.values[k][lst.head] - self.values[k][lst.tail] if lst.size else 0
                for k, lst in enumerate(self.lists)]

    def current_cdis(self, i: int) -> float:
        gaps = [0, 0]
        for k, lst in enumerate(self.lists):
            p, q = lst.prev[i], lst.next[i]
            if p == NIL or q == NIL:
                return INF
            gaps[k] = self.values[k][p] - self.values[k][q]
        return combine_gaps(gaps[0], self.ranges[0], gaps[1], self.ranges[1])

    def _key(self, i: int):
        return (self.current_cdis(i), self.front[i].tie_key, i)

    def remove_min(self) -> tuple[int, float]:
        i, key = self.heap.pop()
        neighbours = set()
        for lst in self.lists:
            neighbours.update(j for j in (lst.prev[i], lst.next[i]) if j != NIL)
            lst.unlink(i)
        ranges = self._ranges()
        if ranges != self.ranges:
            # only possible when an end of a list went; every normalisation changes
            self.ranges = ranges
            self.rebuilds += 1
            neighbours = set(self.alive())
        for j in sorted(neighbours):
            new = self._key(j)
            if new != self.heap.key(j):
                self.heap.update_key(j, new)
        return i, key[0]

    def alive(self) -> list[int]:
        return list(self.lists[0])

    def check_consistency(self) -> None:
        for i in self.alive():
            if self.heap.key(i)[0] != self.current_cdis(i):
                raise AssertionError(f"stale queue key for handle {i}")


def select_current_cd(R: Sequence[Individual], N: int, partition: FrontPartition, rng: RngHandle | None = None,
                      tie_keys: Mapping[int, float] | None = None, debug: bool = False
                      ) -> tuple[Population, RemovalTrace]:
    """Remove the current minimum-crowding-distance member of ``F_i*`` until ``N`` remain."""
    plan = _plan(R, N, partition, rng, tie_keys)
    ws = SelectionWorkspace(plan.critical)
    if debug:
        for i, ind in enumerate(plan.critical):
            assert ws.heap.key(i)[0] == ind.cdis
    removed = []
    for _ in range(plan.n_remove):
        i, d = ws.remove_min()
        removed.append((plan.critical[i].id, d))
        if debug:
            ws.check_consistency()
    for i in ws.alive():
        plan.critical[i].cdis = ws.heap.key(i)[0]
    trace = RemovalTrace(queue_ops=ws.heap.ops, sift_steps=ws.heap.sift_steps)
    return _finish(R, N, plan, removed, trace)


def naive_current_cd_oracle(R: Sequence[Individual], N: int, partition: FrontPartition,
                            rng: RngHandle | None = None, tie_keys: Mapping[int, float] | None = None
                            ) -> tuple[Population, RemovalTrace]:
    """Reference for :func:`select_current_cd`: full crowding recomputation after each removal."""
    plan = _plan(R, N, partition, rng, tie_keys)
    alive = list(range(len(plan.critical)))
    removed = []
    for _ in range(plan.n_remove):
        crowding_distance([plan.critical[i] for i in alive])
        victim = min(alive, key=lambda i: (plan.critical[i].cdis, plan.critical[i].tie_key, i))
        removed.append((plan.critical[victim].id, plan.critical[victim].cdis))
        alive.remove(victim)
    if plan.n_remove and alive:
        crowding_distance([plan.critical[i] for i in alive])
    return _finish(R, N, plan, removed, RemovalTrace())


def select_steady_state(R: Sequence[Individual], partition: FrontPartition, rng: RngHandle | None = None,
                        tie_keys: Mapping[int, float] | None = None, N: int | None = None
                        ) -> tuple[Population, RemovalTrace]:
    """Remove one individual: the minimum ``(cdis, tie_key)`` member of the last front."""
    if N is None:
        N = len(R) - 1
    if len(R) != N + 1:
        raise ValueError(f"steady-state selection needs N+1={N + 1} individuals, got {len(R)}")
    return select_classic(R, N, partition, rng, tie_keys)
