"""Phase-plane tiles and Walsh wave packets.

A tile with spatial interval of length ``2^-j`` owns the ``2^j`` consecutive
integer frequencies ``[n 2^j, (n+1) 2^j)``, so ``|I_p| |omega_p| = 1`` is an
integer identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import UNIT, DyadicInterval, FrequencyInterval, resolution
from .walsh import local_forward, local_inverse, walsh_function


@dataclass(frozen=True, order=True)
class Tile:
    level: int
    index: int
    freq: int

    def __post_init__(self):
        DyadicInterval(self.level, self.index)
        if self.freq < 0:
            raise ValueError("negative tile frequency")

    @property
    def interval(self) -> DyadicInterval:
        return DyadicInterval(self.level, self.index)

    @property
    def omega(self) -> FrequencyInterval:
        L = 1 << self.level
        return FrequencyInterval(self.freq * L, (self.freq + 1) * L)

    def check(self, N: int) -> None:
        if self.level > N or self.omega.b > (1 << N):
            raise ValueError(f"{self} is not resolved at N={N}")

    def to_json(self) -> dict:
        return {"level": self.level, "index": self.index, "freq": self.freq}

    @classmethod
    def from_json(cls, obj: dict) -> Tile:
        return cls(int(obj["level"]), int(obj["index"]), int(obj["freq"]))

    def __repr__(self) -> str:
        return f"Tile({self.interval!r} x {self.omega!r})"


def tile(I: DyadicInterval, omega: FrequencyInterval) -> Tile:
    L = 1 << I.level
    if omega.length != L or omega.a % L:
        raise ValueError(f"{I} x {omega} does not have area one")
    return Tile(I.level, I.index, omega.a // L)


def wave_packet(p: Tile, N: int) -> np.ndarray:
    """``w_p = |I_p|^{-1/2} w_n((x - l_{I_p}) / |I_p|) 1_{I_p}``."""
    p.check(N)
    out = np.zeros(1 << N)
    out[p.interval.cells(N)] = 2.0 ** (p.level / 2) * walsh_function(p.freq, N - p.level)
    return out


def tiles_intersect(p: Tile, q: Tile) -> bool:
    I, J = p.interval, q.interval
    return (I.contains(J) or J.contains(I)) and p.omega.intersects(q.omega)


def local_basis(I: DyadicInterval, N: int) -> list[Tile]:
    """The tiles ``P(I)``; their wave packets form an orthonormal basis of L^2(I)."""
    if I.level > N:
        raise ValueError(f"{I} is finer than resolution {N}")
    return [Tile(I.level, I.index, n) for n in range(1 << (N - I.level))]


def local_coefficients(f, I: DyadicInterval) -> np.ndarray:
    """``<f, w_p>`` for ``p`` in ``P(I)``, indexed by tile frequency."""
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    return local_forward(f[..., I.cells(N)]) * 2.0 ** (-I.level / 2)


def local_synthesis(coeffs, I: DyadicInterval, N: int) -> np.ndarray:
    """``sum_p c_p w_p`` over ``P(I)``; the result lives on the whole grid."""
    out = np.zeros(1 << N)
    out[I.cells(N)] = local_inverse(coeffs) * 2.0 ** (I.level / 2)
    return out


def binary_expansion_intervals(n: int) -> list[FrequencyInterval]:
    """``[0, n)`` cut at the partial sums of the binary digits, largest first."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = []
    acc = 0
    for bit in range(int(n).bit_length() - 1, -1, -1):
        if n >> bit & 1:
            out.append(FrequencyInterval(acc, acc + (1 << bit)))
            acc += 1 << bit
    return out


def projection_tile_expansion(n: int, N: int, root: DyadicInterval = UNIT) -> list[Tile]:
    """Tiles ``P(n)`` whose rank-one projections sum to ``T_[0,n)``.

    For each dyadic piece ``[a, a + 2^t)`` of ``[0, n)`` the tiles have
    length ``2^-t``; they tile ``root`` when ``t`` is at least the level of
    ``root``, otherwise the single ancestor tile covering ``root`` is used,
    so the sum reproduces ``T_[0,n) f`` for every ``f`` supported on ``root``.
    """
    if not 0 <= n <= (1 << N):
        raise ValueError(f"n={n} outside [0, 2^{N}]")
    out = []
    for omega in binary_expansion_intervals(n):
        t = omega.length.bit_length() - 1
        if t >= root.level:
            spatial = root.descendants(t)
        else:
            spatial = [DyadicInterval(t, root.index >> (root.level - t))]
        out.extend(Tile(t, I.index, omega.a >> t) for I in spatial)
    return out


def apply_tiles(f, tiles, N: int | None = None) -> np.ndarray:
    """``sum_p <f, w_p> w_p`` evaluated packet by packet."""
    f = np.asarray(f, dtype=float)
    N = resolution(f) if N is None else N
    out = np.zeros(1 << N)
    for p in tiles:
        w = wave_packet(p, N)
        out += (np.dot(f, w) / (1 << N)) * w
    return out


def signed_haar_factor(n: int, p: Tile, N: int) -> int:
    """Sign ``s`` with ``w_n w_p = s h_{I_p}`` for a tile of the expansion of ``[0, n)``.

    On ``I_p`` with ``omega_p = [a, a + 2^t)``, ``w_a w_p = |I_p|^{-1/2}``,
    ``w_{2^t}`` is the Haar pattern and the lower digits ``r = n - a - 2^t``
    give a character constant on ``I_p``; the sign is its value there.
    """
    p.check(N)
    for omega in binary_expansion_intervals(n):
        if omega == p.omega:
            r = n - omega.b
            return int(walsh_function(r, N)[p.interval.cells(N).start])
    raise ValueError(f"{p} is not in the tile expansion of [0, {n})")


def all_tiles(N: int) -> list[Tile]:
    """Every tile at resolution ``N``, level by level."""
    return [Tile(j, k, n) for j in range(N + 1) for k in range(1 << j) for n in range(1 << (N - j))]


def intersection_matrix(tiles) -> np.ndarray:
    """Boolean matrix of ``tiles_intersect`` over all pairs, vectorized."""
    lv = np.array([p.level for p in tiles])
    ix = np.array([p.index for p in tiles])
    lo = np.array([p.omega.a for p in tiles])
    hi = np.array([p.omega.b for p in tiles])
    common = np.minimum(lv[:, None], lv[None, :])
    # nested iff both indices agree once coarsened to the common level
    nested = (ix[:, None] >> (lv[:, None] - common)) == (ix[None, :] >> (lv[None, :] - common))
    overlap = (np.maximum(lo[:, None], lo[None, :]) < np.minimum(hi[:, None], hi[None, :]))
    return nested & overlap


def gram_matrix(tiles, N: int) -> np.ndarray:
    W = np.array([wave_packet(p, N) for p in tiles])
    return W @ W.T / (1 << N)
