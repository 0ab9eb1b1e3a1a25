"""Value types and the seeded randomness contract shared by every module.

All randomness flows through :class:`RngHandle`, a thin wrapper around
numpy's PCG64 bit generator.  Only the raw 64-bit output of the generator is
consumed; uniform doubles, bounded integers and coins are derived from it by
the fixed recipes below so that the compiled kernel, which reads the same
PCG64 state through numpy's C API, reproduces every draw exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

MASK64 = (1 << 64) - 1
_TWO64 = 1 << 64
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

class ConfigurationError(ValueError):
    """Invalid algorithm or experiment configuration."""


Genome = np.ndarray
"""A genome is a read-only 1-D ``uint8`` array of zeros and ones."""


def make_genome(bits: Iterable[int] | str) -> Genome:
    """Build a validated, read-only genome from bits or a ``"0101"`` string."""
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    arr = np.array(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("genome must be a non-empty 1-D bit sequence")
    if np.any(arr > 1):
        raise ValueError("genome entries must be 0 or 1")
    arr.setflags(write=False)
    return arr


def genome_str(x: Genome) -> str:
    return "".join("1" if b else "0" for b in x)


class ObjectiveVector(NamedTuple):
    """Objective values of one individual; both objectives are maximized."""

    f1: int
    f2: int


def strictly_dominates(u: Sequence[float], v: Sequence[float]) -> bool:
    """True iff ``u >= v`` componentwise with at least one strict inequality."""
    return u[0] >= v[0] and u[1] >= v[1] and (u[0] > v[0] or u[1] > v[1])


@dataclass(eq=False)
class Individual:
    """A genome with its cached objectives and per-selection bookkeeping.

    ``rank`` and ``cdis`` are (re)written by ranking and survival selection,
    ``tie_key`` by survival selection.  Identity is the ``id``; two individuals
    with equal genomes stay distinguishable.
    """

    id: int
    genome: Genome
    objectives: ObjectiveVector | None = None
    rank: int | None = None
    cdis: float | None = None
    tie_key: float | None = None

    @property
    def f1(self) -> int:
        return self.objectives[0]

    @property
    def f2(self) -> int:
        return self.objectives[1]

    def __repr__(self) -> str:
        return f"Individual(id={self.id}, f={tuple(self.objectives) if self.objectives else None}, rank={self.rank}, cdis={self.cdis})"


@dataclass
class Population:
    members: list[Individual]
    capacity: int

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be positive")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Individual]:
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def f1_values(self) -> list[int]:
        return [ind.f1 for ind in self.members]

    def ids(self) -> list[int]:
        return [ind.id for ind in self.members]


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 output function (Steele et al.)."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed of substream ``index`` of ``master``.

    ``splitmix64(master XOR splitmix64(index))``: mixing the index first keeps
    ``(master, index)`` pairs with equal XOR from colliding.
    """
    return splitmix64((master & MASK64) ^ splitmix64(index & MASK64))


class RngHandle:
    """Deterministic random stream for one run.

    Draw recipes (mirrored exactly by the compiled kernel):

    * ``random()``: ``(u64 >> 11) * 2**-53``
    * ``below(k)``: Lemire's multiply-shift with rejection, uniform on ``[0, k)``
    * ``coin()``: top bit of one ``u64``
    * ``genome_bits(n)``: ``ceil(n/64)`` words, bit ``j`` is bit ``j % 64`` of word ``j // 64``
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self.bit_generator = np.random.PCG64(self.seed)
        self._raw = self.bit_generator.random_raw

    def substream(self, index: int) -> "RngHandle":
        return RngHandle(derive_seed(self.seed, index))

    def next_u64(self) -> int:
        return self._raw()

    def random(self) -> float:
        return (self._raw() >> 11) * _INV53

    def below(self, k: int) -> int:
        if k < 1:
            raise ValueError("below() needs k >= 1")
        m = self._raw() * k
        low = m & MASK64
        if low < k:
            threshold = (_TWO64 - k) % k
            while low < threshold:
                m = self._raw() * k
                low = m & MASK64
        return m >> 64

    def coin(self) -> int:
        return self._raw() >> 63

    def genome_bits(self, n: int) -> Genome:
        words = np.array([self._raw() for _ in range((n + 63) // 64)], dtype="<u8")
        bits = np.unpackbits(words.view(np.uint8), bitorder="little")[:n].copy()
        bits.setflags(write=False)
        return bits


def random_population(n: int, N: int, rng: RngHandle) -> Population:
    """``N`` uniformly random genomes of length ``n`` with ids ``0..N-1`` (unevaluated)."""
    if n < 1 or N < 1:
        raise ValueError("need n >= 1 and N >= 1")
    return Population([Individual(i, rng.genome_bits(n)) for i in range(N)], N)


@dataclass
class IdCounter:
    next_id: int = 0

    def __call__(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i


__all__ = [
    "ConfigurationError",
    "Genome",
    "IdCounter",
    "Individual",
    "ObjectiveVector",
    "Population",
    "RngHandle",
    "derive_seed",
    "genome_str",
    "make_genome",
    "random_population",
    "splitmix64",
    "strictly_dominates",
]
