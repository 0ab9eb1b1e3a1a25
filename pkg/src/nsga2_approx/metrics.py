"""Approximation quality of a subset of the OneMinMax Pareto front.

A subset is identified by its distinct first-objective values
``J = {j_1 < ... < j_m}`` in ``[0..n]``; the point for ``j`` is ``(j, n - j)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class FrontSubset:
    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not vals:
            raise ValueError("front subset must be non-empty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("values must be strictly increasing")
        if vals[0] < 0 or vals[-1] > self.n:
            raise ValueError(f"values must lie in [0..{self.n}]")

    @classmethod
    def of(cls, n: int, values: Iterable[int]) -> "FrontSubset":
        """Deduplicate and sort ``values``."""
        return cls(n, tuple(sorted(set(int(v) for v in values))))

    @property
    def has_extremes(self) -> bool:
        return self.values[0] == 0 and self.values[-1] == self.n

    def gaps(self) -> list[int]:
        v = self.values
        return [b - a for a, b in zip(v, v[1:])]

    def points(self) -> list[tuple[int, int]]:
        return [(j, self.n - j) for j in self.values]


@dataclass(frozen=True)
class ReferencePoint:
    r1: float = 0.0
    r2: float = 0.0

    def __post_init__(self):
        if self.r1 > 0 or self.r2 > 0:
            raise ValueError("reference point coordinates must be <= 0")


def _require_extremes(S: FrontSubset) -> None:
    if not S.has_extremes:
        raise ValueError(f"subset must contain both extremes 0 and {S.n}")


def mei_of_values(values: Iterable[int]) -> int:
    """Largest gap between consecutive distinct values; 0 for a single value."""
    v = sorted(set(values))
    if not v:
        raise ValueError("MEI of an empty set")
    return max((b - a for a, b in zip(v, v[1:])), default=0)


def mei(S: FrontSubset) -> int:
    return max(S.gaps(), default=0)


def mei_opt(n: int, N: int) -> int:
    """Smallest MEI achievable by ``N`` points that include both extremes."""
    if N < 2:
        raise ValueError("mei_opt needs N >= 2")
    return -(-n // (N - 1))


def _eps_parts(S: FrontSubset) -> tuple[int, int]:
    _require_extremes(S)
    m = mei(S)
    if m >= S.n:
        raise ValueError("degenerate subset {0, n}: epsilon bound has a zero denominator")
    return m, S.n - m


def eps_upper(S: FrontSubset) -> float:
    m, d = _eps_parts(S)
    return m / d


def eps_lower(S: FrontSubset) -> float:
    m, d = _eps_parts(S)
    return (m - 1) / d


def eps_exact(S: FrontSubset) -> float:
    """Smallest multiplicative epsilon for which ``S`` covers every integer front point.

    Brute force over all ``(k, n-k)``: for each front point the best member of
    ``S``, then the worst front point.
    """
    _require_extremes(S)
    n = S.n
    u = np.array(S.values, dtype=float)
    k = np.arange(n + 1, dtype=float)
    u1, u2 = u[None, :], (n - u)[None, :]
    v1, v2 = k[:, None], (n - k)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        need1 = np.where(v1 <= u1, 0.0, np.where(u1 > 0, v1 / u1 - 1.0, np.inf))
        need2 = np.where(v2 <= u2, 0.0, np.where(u2 > 0, v2 / u2 - 1.0, np.inf))
    per_pair = np.maximum(need1, need2)
    return float(per_pair.min(axis=1).max())


def hv_constant(n: int, r: ReferencePoint) -> float:
    """Hypervolume of the continuous front ``{(x, n-x)}`` w.r.t. ``r``."""
    return -r.r1 * n - r.r2 * n + r.r1 * r.r2 + 0.5 * n * n


def hv_exact(S: FrontSubset, r: ReferencePoint = ReferencePoint()) -> float:
    _require_extremes(S)
    return hv_constant(S.n, r) - 0.5 * sum(g * g for g in S.gaps())


def hv_union_oracle(S: FrontSubset, r: ReferencePoint = ReferencePoint()) -> float:
    """Area of the union of rectangles ``[r1,u1] x [r2,u2]`` by a staircase sweep."""
    area = 0.0
    top = r.r2
    for u1, u2 in sorted(S.points(), reverse=True):
        if u2 > top:
            area += (u1 - r.r1) * (u2 - top)
            top = u2
    return area


def hv_bounds(S: FrontSubset, r: ReferencePoint = ReferencePoint()) -> tuple[float, float]:
    _require_extremes(S)
    size = len(S.values)
    if size < 2:
        raise ValueError("hv_bounds needs at least two points")
    a = hv_constant(S.n, r)
    return a - (size - 1) * mei(S) ** 2 / 2, a - S.n / (2 * (size - 1))


def hv_opt_bounds(n: int, N: int, r: ReferencePoint = ReferencePoint()) -> tuple[float, float]:
    if N < 2:
        raise ValueError("hv_opt_bounds needs N >= 2")
    a = hv_constant(n, r)
    return a - (N - 1) * mei_opt(n, N) ** 2 / 2, a - n / (2 * (N - 1))


def even_spread(n: int, N: int) -> FrontSubset:
    """``j_i = min((i-1) * ceil(n/(N-1)), n)`` for ``i = 1..N``; attains ``mei_opt``."""
    step = mei_opt(n, N)
    return FrontSubset.of(n, (min(i * step, n) for i in range(N)))


@dataclass(frozen=True)
class MetricReport:
    n: int
    size: int
    mei: int
    has_extremes: bool
    singleton: bool
    eps_lower: float | None = None
    eps_upper: float | None = None
    eps_exact: float | None = None
    hv: float | None = None
    hv_lower: float | None = None
    hv_upper: float | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, float) and math.isinf(v):
                out[k] = "inf"
        return out


def metric_report(S: FrontSubset, r: ReferencePoint = ReferencePoint()) -> MetricReport:
    """All measures that are defined for ``S``; undefined ones stay ``None``."""
    base = dict(n=S.n, size=len(S.values), mei=mei(S), has_extremes=S.has_extremes,
                singleton=len(S.values) == 1)
    if not S.has_extremes or len(S.values) < 2:
        return MetricReport(**base, hv=hv_union_oracle(S, r))
    lo, hi = hv_bounds(S, r)
    extra = dict(hv=hv_exact(S, r), hv_lower=lo, hv_upper=hi, eps_exact=eps_exact(S))
    if mei(S) < S.n:
        extra.update(eps_lower=eps_lower(S), eps_upper=eps_upper(S))
    return MetricReport(**base, **extra)
