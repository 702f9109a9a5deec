"""Walsh-Littlewood-Paley square functions and the reduction of ``S_lambda``
to a martingale square function plus two good collections."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dyadic import UNIT, DyadicInterval, FrequencyInterval, resolution
from .tiles import binary_expansion_intervals
from .walsh import haar_forward, local_forward, modulate, walsh_forward, walsh_function, walsh_inverse


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class GoodCollection:
    """Disjoint intervals ``[2^k, v_k)`` with ``2^k < v_k <= 2^{k+1}`` and
    ``2^k |base| >= 1``, at most one per ``k``."""

    intervals: tuple[FrequencyInterval, ...]
    base: DyadicInterval = UNIT

    def __post_init__(self):
        ivs = sorted((w if isinstance(w, FrequencyInterval) else FrequencyInterval(*w)
                      for w in self.intervals), key=lambda w: w.a)
        for w in ivs:
            if not _is_pow2(w.a):
                raise ValueError(f"{w} does not start at a power of two")
            if w.b > 2 * w.a:
                raise ValueError(f"{w} leaves its dyadic block")
            if w.a < (1 << self.base.level):
                raise ValueError(f"{w} is finer than the scale of {self.base}")
        for u, w in zip(ivs, ivs[1:]):
            if u.b > w.a:
                raise ValueError(f"{u} and {w} overlap")
        object.__setattr__(self, "intervals", tuple(ivs))

    def induced(self, I: DyadicInterval) -> GoodCollection:
        L = 1 << I.level
        inner = [w.interior(L) for w in self.intervals]
        return GoodCollection(tuple(w for w in inner if w is not None), I)

    def to_json(self) -> dict:
        return {"intervals": [[w.a, w.b] for w in self.intervals]}

    @classmethod
    def from_json(cls, obj: dict, base: DyadicInterval = UNIT) -> GoodCollection:
        return cls(tuple(FrequencyInterval(int(a), int(b)) for a, b in obj["intervals"]), base)


@dataclass(frozen=True)
class MartingaleGrid:
    """Increasing grid ``mu_0 < mu_1 < ...`` of powers of two (a leading 0 allowed)."""

    points: tuple[int, ...]

    def __post_init__(self):
        pts = tuple(int(x) for x in self.points)
        for i, x in enumerate(pts):
            if not (_is_pow2(x) or (x == 0 and i == 0)):
                raise ValueError(f"grid point {x} is not a power of two")
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def intervals(self) -> list[FrequencyInterval]:
        return [FrequencyInterval(a, b) for a, b in zip(self.points, self.points[1:])]


def square_function(f, intervals) -> np.ndarray:
    """``sqrt(sum |T_omega f|^2)`` over the given disjoint intervals."""
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    ivs = list(intervals)
    if not ivs:
        return np.zeros_like(f)
    masks = np.zeros((len(ivs), 1 << N))
    for i, w in enumerate(ivs):
        masks[i, w.a:min(w.b, 1 << N)] = 1.0
    parts = walsh_inverse(walsh_forward(f)[None, :] * masks)
    return np.sqrt(np.sum(parts ** 2, axis=0))


def lambda_blocks(lam: int, N: int) -> list[FrequencyInterval]:
    """``{0}`` and ``[lam^{k-1}, lam^k)``, the last block clipped at ``2^N``."""
    if lam < 2:
        raise ValueError("lambda must be an integer >= 2")
    out = [FrequencyInterval(0, 1)]
    u = 1
    while u < (1 << N):
        out.append(FrequencyInterval(u, min(u * lam, 1 << N)))
        u *= lam
    return out


def s_lambda(f, lam: int) -> np.ndarray:
    """``S_lambda f = (|f^(0)|^2 + sum_k |T_[lam^{k-1}, lam^k) f|^2)^{1/2}``."""
    return square_function(f, lambda_blocks(lam, resolution(f)))


def s_local(f, I: DyadicInterval = UNIT) -> np.ndarray:
    """``S_I(f)^2 = sum_{Q ⊆ I} |<f, h_Q>|^2 / |Q| 1_Q`` (zero off ``I``)."""
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    _, coeffs = haar_forward(f)
    sq = np.zeros(1 << N)
    for j in range(I.level, N):
        d = j - I.level
        lo = I.index << d
        c = coeffs[j][lo:lo + (1 << d)]
        s = I.cells(N)
        sq[s] += np.repeat(c ** 2 * 2.0 ** j, 1 << (N - j))
    return np.sqrt(sq)


def s_good(f, omega: GoodCollection) -> np.ndarray:
    return square_function(f, omega.intervals)


def partial_sum_by_tiles(phi, u: int) -> np.ndarray:
    """``T_[0,u) phi`` assembled from the tile expansion of ``[0, u)``."""
    phi = np.asarray(phi, dtype=float)
    N = resolution(phi)
    out = np.zeros(1 << N)
    for w in binary_expansion_intervals(u):
        t = w.length.bit_length() - 1
        rows = phi.reshape(1 << t, -1)
        n = w.a >> t
        coef = local_forward(rows)[:, n]
        out += (coef[:, None] * walsh_function(n, N - t)[None, :]).reshape(-1)
    return out


def s_good_modulated(f, omega: GoodCollection) -> np.ndarray:
    """Same square function via ``|T_[2^k, v) f| = |T_[0, v - 2^k)(w_{2^k} f)|``."""
    f = np.asarray(f, dtype=float)
    sq = np.zeros_like(f)
    for w in omega.intervals:
        sq += partial_sum_by_tiles(modulate(f, w.a), w.b - w.a) ** 2
    return np.sqrt(sq)


def s_martingale(f, mu: MartingaleGrid) -> np.ndarray:
    return square_function(f, mu.intervals)


@dataclass
class SLambdaReduction:
    lam: int
    N: int
    martingale: MartingaleGrid
    right: GoodCollection
    left: GoodCollection
    kappa: int
    blocks: list[dict] = field(default_factory=list)


def reduce_s_lambda(lam: int, N: int) -> SLambdaReduction:
    """Split every block ``[u, v)`` at ``2^a`` (least power >= u) and ``2^b``
    (greatest power <= v).

    Middle parts go to the martingale grid, right parts ``[2^b, v)`` form a
    good collection, and a left part ``[u, 2^a)`` is dominated through
    ``T_[u,2^a) = T_[2^{a-1},2^a) - T_[2^{a-1},u)``: the full block joins the
    martingale grid and ``[2^{a-1}, u)`` the second good collection.  With
    ``p`` nonempty parts, ``|sum of parts|^2 <= p sum |part|^2`` and the left
    split costs another factor 2, so ``kappa = max p (2 if left else 1)``.
    """
    points = {0, 1 << N}
    right, left, blocks = [], [], []
    kappa = 1
    for w in lambda_blocks(lam, N)[1:]:
        u, v = w.a, w.b
        a = (u - 1).bit_length()
        b = v.bit_length() - 1
        parts = []
        has_left = u < (1 << a)
        if has_left:
            parts.append("left")
            points.update((1 << (a - 1), 1 << a))
            left.append(FrequencyInterval(1 << (a - 1), u))
        if a < b:
            parts.append("middle")
            points.update((1 << a, 1 << b))
        if (1 << b) < v:
            parts.append("right")
            right.append(FrequencyInterval(1 << b, v))
            points.add(1 << b)
        kappa = max(kappa, len(parts) * (2 if has_left else 1))
        blocks.append({"block": [u, v], "a": a, "b": b, "parts": parts})
    points.add(1)
    grid = MartingaleGrid(tuple(sorted(p for p in points if p <= (1 << N))))
    return SLambdaReduction(lam, N, grid, GoodCollection(tuple(right)),
                            GoodCollection(tuple(left)), kappa, blocks)
