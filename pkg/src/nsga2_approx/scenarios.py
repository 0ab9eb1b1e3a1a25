"""The two synthetic one-step situations where classic survival selection approximates badly.

* Full coverage: ``R`` holds one individual for each ``f1`` value in ``[0..n]``
  (``n`` odd, ``N = (n+1)/2``).  Every inner individual has crowding distance
  ``4/n``, so classic selection keeps a uniformly random half of them.
* Adversarial: ``f1(R) = [0..n/3+1] U {n/3 + 2i : i in [1..n/3]}`` with
  ``N = n/3 + 1``.  The dense block has the smallest crowding distance and is
  removed whole, leaving an empty interval of length ``n/3 + 2``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .core import ConfigurationError, Individual, ObjectiveVector, RngHandle, make_genome
from .harness.stats import QuartileSummary, quartiles
from .metrics import mei_of_values
from .ranking import non_dominated_sort
from .survival import select_classic, select_current_cd


class ScenarioKind(str, enum.Enum):
    FULL_COVERAGE = "full-coverage"
    ADVERSARIAL = "adversarial"


class SelectionEngine(str, enum.Enum):
    CLASSIC = "classic"
    CURRENT_CD = "current-cd"


def _individual(i: int, n: int, k: int) -> Individual:
    """Individual with ``f1 = k`` zeros: genome ``1^(n-k) 0^k``."""
    genome = make_genome([1] * (n - k) + [0] * k)
    return Individual(i, genome, ObjectiveVector(k, n - k))


def build_full_coverage(n: int) -> list[Individual]:
    if n < 7 or n % 2 == 0:
        raise ConfigurationError(f"full coverage needs odd n >= 7, got {n}")
    return [_individual(k, n, k) for k in range(n + 1)]


def adversarial_values(n: int) -> list[int]:
    if n < 3 or n % 3:
        raise ConfigurationError(f"adversarial construction needs n a positive multiple of 3, got {n}")
    third = n // 3
    return list(range(third + 2)) + [third + 2 * i for i in range(1, third + 1)]


def build_adversarial(n: int) -> list[Individual]:
    return [_individual(i, n, k) for i, k in enumerate(adversarial_values(n))]


def alternating_keep(R: Sequence[Individual]) -> list[Individual]:
    """Keep the lowest ``f1``, drop the next two, keep the fourth, then drop/keep alternately."""
    ordered = sorted(R, key=lambda ind: ind.f1)
    return [ind for i, ind in enumerate(ordered) if i == 0 or (i >= 3 and i % 2 == 1)]


@dataclass(frozen=True)
class Scenario:
    kind: ScenarioKind
    n: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        self.build()

    @property
    def N(self) -> int:
        return (self.n + 1) // 2 if self.kind is ScenarioKind.FULL_COVERAGE else self.n // 3 + 1

    def build(self) -> list[Individual]:
        if self.kind is ScenarioKind.FULL_COVERAGE:
            return build_full_coverage(self.n)
        return build_adversarial(self.n)


@dataclass
class TrialStats:
    samples: list[int]

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def quartiles(self) -> QuartileSummary:
        return quartiles(self.samples)

    def fraction_at_least(self, threshold: float) -> float:
        return float(np.mean(np.asarray(self.samples) >= threshold))

    def fraction_above(self, threshold: float) -> float:
        return float(np.mean(np.asarray(self.samples) > threshold))


def _trial_python(R, N, engine, rng) -> int:
    partition = non_dominated_sort(R)
    select = select_current_cd if engine is SelectionEngine.CURRENT_CD else select_classic
    P, _ = select(R, N, partition, rng)
    return mei_of_values(P.f1_values())


def _trial_compiled(f1, f2, N, engine, rng) -> int:
    # every OneMinMax individual is non-dominated, so R is a single front
    tie = [rng.random() for _ in range(len(f1))]
    removed, _, _ = _backend.kernel().select_front(f1, f2, tie, N, engine is SelectionEngine.CURRENT_CD)
    keep = np.ones(len(f1), dtype=bool)
    keep[removed] = False
    return mei_of_values(f1[keep].tolist())


def run_selection_trials(scenario: Scenario, engine: SelectionEngine | str, trials: int, rng: RngHandle,
                         backend: str = "auto") -> TrialStats:
    """One survival selection per trial on a fresh ``R``; trial ``i`` draws from ``rng.substream(i)``."""
    if trials < 1:
        raise ValueError("trials must be positive")
    engine = SelectionEngine(engine)
    name = _backend.resolve(backend)
    N = scenario.N
    samples = []
    template = scenario.build()
    f1 = np.array([ind.f1 for ind in template], dtype=np.int32)
    f2 = np.array([ind.f2 for ind in template], dtype=np.int32)
    for t in range(trials):
        sub = rng.substream(t)
        if name == "compiled":
            samples.append(_trial_compiled(f1, f2, N, engine, sub))
        else:
            samples.append(_trial_python(scenario.build(), N, engine, sub))
    return TrialStats(samples)
