"""Walsh multipliers: symbols, R_{q,1} atoms, the Marcinkiewicz norm,
atomization, induced multipliers and the jump-tile partition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dyadic import DyadicInterval, FrequencyInterval, resolution
from .tiles import Tile
from .walsh import walsh_forward, walsh_inverse


def _as_interval(w) -> FrequencyInterval:
    if isinstance(w, FrequencyInterval):
        return w
    a, b = w
    return FrequencyInterval(int(a), int(b))


@dataclass(frozen=True)
class MultiplierSymbol:
    """``m = sum c_omega 1_omega`` over disjoint frequency intervals.

    The stored form is canonical: sorted, zero pieces dropped and adjacent
    pieces with equal coefficients merged.
    """

    pieces: tuple[tuple[FrequencyInterval, float], ...]

    def __post_init__(self):
        items = sorted(((_as_interval(w), float(c)) for w, c in self.pieces),
                       key=lambda t: t[0].a)
        merged: list[tuple[FrequencyInterval, float]] = []
        for w, c in items:
            if merged and merged[-1][0].b > w.a:
                raise ValueError(f"overlapping pieces {merged[-1][0]} and {w}")
            if c == 0.0:
                continue
            if merged and merged[-1][0].b == w.a and merged[-1][1] == c:
                merged[-1] = (FrequencyInterval(merged[-1][0].a, w.b), c)
            else:
                merged.append((w, c))
        object.__setattr__(self, "pieces", tuple(merged))

    @classmethod
    def from_values(cls, values) -> MultiplierSymbol:
        v = np.asarray(values, dtype=float)
        pieces = []
        start = 0
        for n in range(1, len(v) + 1):
            if n == len(v) or v[n] != v[start]:
                pieces.append(((start, n), v[start]))
                start = n
        return cls(tuple(pieces))

    @classmethod
    def constant(cls, c: float, N: int) -> MultiplierSymbol:
        return cls((((0, 1 << N), c),))

    @property
    def intervals(self) -> list[FrequencyInterval]:
        return [w for w, _ in self.pieces]

    def values(self, N: int) -> np.ndarray:
        out = np.zeros(1 << N)
        for w, c in self.pieces:
            if w.b > (1 << N):
                raise ValueError(f"{w} exceeds [0, 2^{N})")
            out[w.a:w.b] = c
        return out

    def is_adapted(self, I: DyadicInterval) -> bool:
        L = 1 << I.level
        return all(w.a % L == 0 and w.b % L == 0 for w in self.intervals)

    def to_json(self) -> dict:
        return {"pieces": [{"a": w.a, "b": w.b, "c": c} for w, c in self.pieces]}

    @classmethod
    def from_json(cls, obj: dict) -> MultiplierSymbol:
        return cls(tuple(((p["a"], p["b"]), p["c"]) for p in obj["pieces"]))


def block_range(k: int) -> FrequencyInterval:
    """Frequency block ``k`` of an atom: ``[2^{k-1}, 2^k)``; block 0 is ``{0}``."""
    if k < 0:
        raise ValueError("negative block index")
    return FrequencyInterval(0, 1) if k == 0 else FrequencyInterval(1 << (k - 1), 1 << k)


def block_of(n: int) -> int:
    return int(n).bit_length()


@dataclass(frozen=True)
class AtomRq1:
    """R_{q,1} atom of at most ``J`` jumps.

    ``blocks`` maps a block index ``k`` to disjoint intervals inside
    ``[2^{k-1}, 2^k)``; the atom equals ``J^{-1/q}`` on their union.  Block 0
    (the zero frequency) is allowed so that finite symbols can be atomized.
    """

    q: float
    J: int
    blocks: Mapping[int, Sequence[FrequencyInterval]]

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("atoms need q >= 1")
        if self.J < 1:
            raise ValueError("atoms need J >= 1")
        norm = {}
        for k, ivs in self.blocks.items():
            k = int(k)
            ivs = sorted((_as_interval(w) for w in ivs), key=lambda w: w.a)
            if not ivs:
                continue
            if len(ivs) > self.J:
                raise ValueError(f"block {k} has {len(ivs)} > J={self.J} intervals")
            B = block_range(k)
            for prev, w in zip([None] + ivs[:-1], ivs):
                if not w.issubset(B):
                    raise ValueError(f"{w} is not inside block {k} = {B}")
                if prev is not None and prev.b > w.a:
                    raise ValueError(f"overlapping intervals {prev} and {w}")
            norm[k] = tuple(ivs)
        object.__setattr__(self, "blocks", dict(sorted(norm.items())))

    @property
    def coefficient(self) -> float:
        return self.J ** (-1.0 / self.q)

    @property
    def intervals(self) -> list[FrequencyInterval]:
        return [w for ivs in self.blocks.values() for w in ivs]

    @property
    def pieces(self) -> list[tuple[FrequencyInterval, float]]:
        c = self.coefficient
        return [(w, c) for w in self.intervals]

    @property
    def max_frequency(self) -> int:
        ivs = self.intervals
        return max(w.b for w in ivs) if ivs else 0

    def values(self, N: int) -> np.ndarray:
        out = np.zeros(1 << N)
        c = self.coefficient
        for w in self.intervals:
            if w.b > (1 << N):
                raise ValueError(f"{w} exceeds [0, 2^{N})")
            out[w.a:w.b] = c
        return out

    def symbol(self) -> MultiplierSymbol:
        return MultiplierSymbol(tuple(self.pieces))

    def is_adapted(self, I: DyadicInterval) -> bool:
        L = 1 << I.level
        return all(w.a % L == 0 and w.b % L == 0 for w in self.intervals)

    def to_json(self) -> dict:
        return {"q": self.q, "J": self.J,
                "blocks": [{"k": k, "intervals": [[w.a, w.b] for w in ivs]}
                           for k, ivs in self.blocks.items()]}

    @classmethod
    def from_json(cls, obj: dict) -> AtomRq1:
        return cls(float(obj["q"]), int(obj["J"]),
                   {int(b["k"]): [tuple(w) for w in b["intervals"]] for b in obj["blocks"]})


def multiplier_from_json(obj: dict):
    if "pieces" in obj:
        return MultiplierSymbol.from_json(obj)
    if "blocks" in obj:
        return AtomRq1.from_json(obj)
    raise ValueError("multiplier JSON needs 'pieces' or 'blocks'")


def symbol_values(m, N: int) -> np.ndarray:
    if isinstance(m, (MultiplierSymbol, AtomRq1)):
        return m.values(N)
    v = np.asarray(m, dtype=float)
    if v.shape != (1 << N,):
        raise ValueError("symbol array does not match the resolution")
    return v


def apply(m, f) -> np.ndarray:
    """``T_m f = sum_n m(n) <f, w_n> w_n``."""
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    return walsh_inverse(walsh_forward(f) * symbol_values(m, N))


def random_atom(rng: np.random.Generator, N: int, J: int, q: float = 1.0,
                fill: float = 0.7, max_block: int | None = None) -> AtomRq1:
    """Atom with up to ``J`` random intervals in each block ``1..max_block``."""
    max_block = N if max_block is None else max_block
    blocks = {}
    for k in range(1, max_block + 1):
        if rng.random() > fill:
            continue
        B = block_range(k)
        slots = B.length + 1
        count = int(rng.integers(1, J + 1))
        count = min(count, slots // 2)
        if count == 0:
            continue
        cuts = np.sort(rng.choice(slots, size=2 * count, replace=False)) + B.a
        blocks[k] = [(int(cuts[2 * i]), int(cuts[2 * i + 1])) for i in range(count)]
    return AtomRq1(q, J, blocks)


# --- Marcinkiewicz norm ----------------------------------------------------

@dataclass(frozen=True)
class BlockBV:
    """Per dyadic block ``[2^j, 2^{j+1})``: variation and sup of the symbol."""

    variation: np.ndarray
    sup: np.ndarray


def block_bv(m, N: int) -> BlockBV:
    """Each difference ``|m(n+1) - m(n)|`` is charged to the block of ``n+1``,
    so the jump into a block is counted once and every jump exactly once."""
    v = symbol_values(m, N)
    jumps = np.abs(np.diff(v))
    var = np.zeros(N)
    sup = np.zeros(N)
    for j in range(N):
        lo, hi = 1 << j, 1 << (j + 1)
        var[j] = jumps[lo - 1:hi - 1].sum()
        sup[j] = np.abs(v[lo:hi]).max()
    return BlockBV(var, sup)


def marcinkiewicz_norm(m, N: int) -> float:
    v = symbol_values(m, N)
    return float(np.abs(v).max() + block_bv(v, N).variation.max())


def _layer_atoms(levels_per_block: dict[int, np.ndarray], sign: float):
    """Layer cake of nonnegative, nondecreasing per-block profiles.

    ``levels_per_block[k]`` holds the profile on block ``k``; every level ``t``
    gives the atom whose block-``k`` interval is ``{n : profile(n) >= t}``.
    """
    values = set()
    for prof in levels_per_block.values():
        values.update(float(x) for x in prof if x > 0)
    out = []
    prev = 0.0
    for t in sorted(values):
        blocks = {}
        for k, prof in levels_per_block.items():
            hit = np.nonzero(prof >= t)[0]
            if len(hit):
                B = block_range(k)
                blocks[k] = [(B.a + int(hit[0]), B.b)]
        out.append((sign * (t - prev), AtomRq1(1.0, 1, blocks)))
        prev = t
    return out


def atomize_marcinkiewicz(m, N: int) -> list[tuple[float, AtomRq1]]:
    """Write ``m`` as ``sum theta_i a_i`` with R_{1,1} atoms ``a_i`` (J = 1).

    Block constants are layered first, then on each block the remainder is
    split into increasing and decreasing parts vanishing at the block start,
    whose level sets are end segments of the block.  Weights carry the sign of
    the part they come from; ``sum |theta_i| <= 2 ||m||_M``.
    """
    v = symbol_values(m, N)
    blocks = range(0, N + 1)
    const = {k: v[block_range(k).a] for k in blocks}
    pos = {k: np.full(block_range(k).length, max(c, 0.0)) for k, c in const.items()}
    neg = {k: np.full(block_range(k).length, max(-c, 0.0)) for k, c in const.items()}
    inc, dec = {}, {}
    for k in blocks:
        B = block_range(k)
        d = np.diff(v[B.a:B.b], prepend=v[B.a])
        inc[k] = np.cumsum(np.maximum(d, 0.0))
        dec[k] = np.cumsum(np.maximum(-d, 0.0))
    return (_layer_atoms(pos, 1.0) + _layer_atoms(neg, -1.0)
            + _layer_atoms(inc, 1.0) + _layer_atoms(dec, -1.0))


def recombine(atoms, N: int) -> np.ndarray:
    out = np.zeros(1 << N)
    for theta, a in atoms:
        out += theta * a.values(N)
    return out


# --- induced multipliers and tile partition ---------------------------------

def relative_interior(omega: FrequencyInterval, I: DyadicInterval) -> FrequencyInterval | None:
    """Union of the frequency blocks of length ``1/|I|`` lying inside ``omega``."""
    return omega.interior(1 << I.level)


def induce(m, I: DyadicInterval):
    """Induced multiplier ``m_I = sum c_omega 1_{interior of omega at scale I}``."""
    if isinstance(m, AtomRq1):
        blocks = {}
        for k, ivs in m.blocks.items():
            inner = [w for w in (relative_interior(w, I) for w in ivs) if w is not None]
            if inner:
                blocks[k] = inner
        return AtomRq1(m.q, m.J, blocks)
    if isinstance(m, MultiplierSymbol):
        pieces = []
        for w, c in m.pieces:
            inner = relative_interior(w, I)
            if inner is not None:
                pieces.append((inner, c))
        return MultiplierSymbol(tuple(pieces))
    raise TypeError(f"cannot induce {type(m).__name__}")


def jump_tile_mask(intervals, level: int, n_tiles: int) -> np.ndarray:
    """Mask over tile frequencies ``n`` at ``level``: ``[n 2^level, (n+1) 2^level)``
    meets some interval without lying inside it."""
    L = 1 << level
    mask = np.zeros(n_tiles, dtype=bool)
    for w in intervals:
        if w.a % L and w.a // L < n_tiles:
            mask[w.a // L] = True
        if w.b % L and (w.b - 1) // L < n_tiles:
            mask[(w.b - 1) // L] = True
    return mask


def _omega_of(m):
    if isinstance(m, (AtomRq1, MultiplierSymbol)):
        return m.intervals
    return [_as_interval(w) for w in m]


def tile_partition(m, I: DyadicInterval, N: int,
                   root: DyadicInterval | None = None) -> tuple[list[Tile], list[Tile]]:
    """Split ``P(I)`` into jump tiles ``P_m(I)`` and the rest ``P'_m(I)``."""
    if root is not None:
        if not root.contains(I):
            raise ValueError(f"{I} is not inside {root}")
        if hasattr(m, "is_adapted") and not m.is_adapted(root):
            raise ValueError(f"multiplier is not adapted to {root}")
    n_tiles = 1 << (N - I.level)
    mask = jump_tile_mask(_omega_of(m), I.level, n_tiles)
    tiles = [Tile(I.level, I.index, n) for n in range(n_tiles)]
    return ([p for p, b in zip(tiles, mask) if b],
            [p for p, b in zip(tiles, mask) if not b])


def partition_block_counts(m, I: DyadicInterval, N: int) -> dict[int, int]:
    """``|P_m(I, k)|``: jump tiles with frequencies in ``|I|^{-1} [2^k, 2^{k+1})``."""
    jumps, _ = tile_partition(m, I, N)
    counts: dict[int, int] = {}
    for p in jumps:
        if p.freq > 0:
            k = p.freq.bit_length() - 1
            counts[k] = counts.get(k, 0) + 1
    return counts
