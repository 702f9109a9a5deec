"""Dyadic geometry at a fixed resolution.

A *signal* is a plain ``numpy`` array of ``2**N`` reals, read as a function
that is constant on the cells ``[i 2^-N, (i+1) 2^-N)`` of ``[0, 1)``.  All
intervals are dyadic, so every identity below is exact up to rounding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

import numpy as np

MAX_LEVEL = 24


def resolution(f) -> int:
    """Return ``N`` such that ``len(f) == 2**N`` (last axis for batches)."""
    n = np.shape(f)[-1]
    N = int(n).bit_length() - 1
    if n < 2 or (1 << N) != n:
        raise ValueError(f"signal length {n} is not a power of two >= 2")
    if N > MAX_LEVEL:
        raise ValueError(f"resolution {N} exceeds the maximum {MAX_LEVEL}")
    return N


def as_signal(values, N: int | None = None) -> np.ndarray:
    f = np.asarray(values, dtype=float)
    if f.ndim != 1:
        raise ValueError("a signal is one-dimensional")
    M = resolution(f)
    if N is not None and M != N:
        raise ValueError(f"signal has resolution {M}, expected {N}")
    return f


def integral(f) -> float:
    return float(np.sum(f)) / np.shape(f)[-1]


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """``[index 2^-level, (index+1) 2^-level)``."""

    level: int
    index: int

    def __post_init__(self):
        if not 0 <= self.level <= MAX_LEVEL:
            raise ValueError(f"level {self.level} out of range")
        if not 0 <= self.index < (1 << self.level):
            raise ValueError(f"index {self.index} out of range at level {self.level}")

    @property
    def length(self) -> float:
        return 2.0 ** -self.level

    @property
    def left(self) -> float:
        return self.index * self.length

    @property
    def right(self) -> float:
        return (self.index + 1) * self.length

    def children(self, N: int | None = None) -> tuple[DyadicInterval, DyadicInterval]:
        if N is not None and self.level >= N:
            raise ValueError(f"{self} has no children at resolution {N}")
        return (DyadicInterval(self.level + 1, 2 * self.index),
                DyadicInterval(self.level + 1, 2 * self.index + 1))

    @property
    def parent(self) -> DyadicInterval:
        if self.level == 0:
            raise ValueError("[0,1) has no parent")
        return DyadicInterval(self.level - 1, self.index >> 1)

    def contains(self, other: DyadicInterval) -> bool:
        """Non-strict inclusion ``other ⊆ self``."""
        if other.level < self.level:
            return False
        return (other.index >> (other.level - self.level)) == self.index

    def cells(self, N: int) -> slice:
        if self.level > N:
            raise ValueError(f"{self} is finer than resolution {N}")
        w = 1 << (N - self.level)
        return slice(self.index * w, (self.index + 1) * w)

    def indicator(self, N: int) -> np.ndarray:
        out = np.zeros(1 << N)
        out[self.cells(N)] = 1.0
        return out

    def descendants(self, level: int) -> list[DyadicInterval]:
        """Subintervals of ``self`` at the given (finer or equal) level."""
        d = level - self.level
        if d < 0:
            raise ValueError("level coarser than the interval")
        return [DyadicInterval(level, (self.index << d) + i) for i in range(1 << d)]

    def to_json(self) -> dict:
        return {"level": self.level, "index": self.index}

    @classmethod
    def from_json(cls, obj: dict) -> DyadicInterval:
        return cls(int(obj["level"]), int(obj["index"]))

    def __repr__(self) -> str:
        return f"I({self.level},{self.index})"


UNIT = DyadicInterval(0, 0)


def children(I: DyadicInterval, N: int | None = None):
    return I.children(N)


def contains(I: DyadicInterval, J: DyadicInterval) -> bool:
    return I.contains(J)


def cells(I: DyadicInterval, N: int) -> range:
    s = I.cells(N)
    return range(s.start, s.stop)


def all_intervals(N: int, root: DyadicInterval = UNIT) -> Iterator[DyadicInterval]:
    """Every dyadic subinterval of ``root`` down to single cells, coarse first."""
    for level in range(root.level, N + 1):
        yield from root.descendants(level)


@dataclass(frozen=True, order=True)
class FrequencyInterval:
    """Integer frequencies ``{a, ..., b-1}``."""

    a: int
    b: int

    def __post_init__(self):
        if not 0 <= self.a < self.b:
            raise ValueError(f"empty or negative frequency interval [{self.a},{self.b})")

    @property
    def length(self) -> int:
        return self.b - self.a

    @property
    def is_dyadic(self) -> bool:
        L = self.length
        return L & (L - 1) == 0 and self.a % L == 0

    def __contains__(self, n: int) -> bool:
        return self.a <= n < self.b

    def intersects(self, other: FrequencyInterval) -> bool:
        return self.a < other.b and other.a < self.b

    def issubset(self, other: FrequencyInterval) -> bool:
        return other.a <= self.a and self.b <= other.b

    def interior(self, block: int) -> FrequencyInterval | None:
        """Union of the blocks ``[n block, (n+1) block)`` inside ``self``."""
        lo = -(-self.a // block) * block
        hi = (self.b // block) * block
        return FrequencyInterval(lo, hi) if lo < hi else None

    def indicator(self, N: int) -> np.ndarray:
        out = np.zeros(1 << N)
        out[self.a:min(self.b, 1 << N)] = 1.0
        return out

    def to_json(self) -> list:
        return [self.a, self.b]

    def __repr__(self) -> str:
        return f"[{self.a},{self.b})"


def average(f, I: DyadicInterval, p: float = 1.0) -> float:
    """``(|I|^-1 ∫_I |f|^p)^(1/p)`` as an exact cell sum; ``p = inf`` gives the sup."""
    if p < 1:
        raise ValueError("p < 1 is not a norm; use the orlicz module for other averages")
    N = resolution(f)
    v = np.abs(np.asarray(f, dtype=float)[I.cells(N)])
    if np.isinf(p):
        return float(v.max())
    if p == 1:
        return float(v.mean())
    return float(np.mean(v ** p) ** (1.0 / p))


def level_rows(f, level: int, root: DyadicInterval = UNIT) -> np.ndarray:
    """View of ``f`` on ``root`` as rows, one per subinterval at ``level``."""
    N = resolution(f)
    local = np.asarray(f)[root.cells(N)]
    return local.reshape(1 << (level - root.level), -1)


def level_averages(f, level: int, p: float = 1.0, root: DyadicInterval = UNIT) -> np.ndarray:
    rows = np.abs(level_rows(f, level, root))
    if np.isinf(p):
        return rows.max(axis=1)
    return np.mean(rows ** p, axis=1) ** (1.0 / p)


def union_measure(intervals, N: int) -> float:
    mask = np.zeros(1 << N, dtype=bool)
    for I in intervals:
        mask[I.cells(N)] = True
    return mask.mean()


def signal_to_json(f) -> dict:
    f = as_signal(f)
    return {"N": resolution(f), "values": [float(x) for x in f]}


def signal_from_json(obj: dict) -> np.ndarray:
    return as_signal(obj["values"], int(obj["N"]))


def load_signal(path) -> np.ndarray:
    with open(path) as fh:
        return signal_from_json(json.load(fh))
