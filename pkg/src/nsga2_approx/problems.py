"""Bi-objective pseudo-Boolean benchmarks (both objectives maximized)."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import Genome, ObjectiveVector


class ProblemKind(str, enum.Enum):
    ONE_MIN_MAX = "oneminmax"
    LOTZ = "lotz"


def eval_one_min_max(x: Genome) -> ObjectiveVector:
    """(number of zeros, number of ones)."""
    ones = int(np.count_nonzero(x))
    return ObjectiveVector(len(x) - ones, ones)


def eval_lotz(x: Genome) -> ObjectiveVector:
    """(leading ones, trailing zeros)."""
    x = np.asarray(x)
    zeros = np.flatnonzero(x == 0)
    leading_ones = int(zeros[0]) if zeros.size else len(x)
    ones = np.flatnonzero(x)
    trailing_zeros = len(x) - 1 - int(ones[-1]) if ones.size else len(x)
    return ObjectiveVector(leading_ones, trailing_zeros)


_EVALUATORS = {ProblemKind.ONE_MIN_MAX: eval_one_min_max, ProblemKind.LOTZ: eval_lotz}


@dataclass(frozen=True)
class Problem:
    kind: ProblemKind
    n: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ProblemKind(self.kind))
        if self.n < 1:
            raise ValueError("problem size n must be >= 1")

    @classmethod
    def one_min_max(cls, n: int) -> "Problem":
        return cls(ProblemKind.ONE_MIN_MAX, n)

    @classmethod
    def lotz(cls, n: int) -> "Problem":
        return cls(ProblemKind.LOTZ, n)

    def evaluate(self, x: Genome) -> ObjectiveVector:
        if len(x) != self.n:
            raise ValueError(f"genome length {len(x)} != n={self.n}")
        return _EVALUATORS[self.kind](x)


class Evaluator:
    """Counts fitness evaluations of a problem."""

    def __init__(self, problem: Problem):
        self.problem = problem
        self.count = 0

    def __call__(self, x: Genome) -> ObjectiveVector:
        self.count += 1
        return self.problem.evaluate(x)
