"""Fast Walsh-Paley and Haar transforms.

Walsh functions are in Paley order: ``w_n`` is the product of the
Rademacher functions ``w_{2^k}(x) = sign(sin(2^{k+1} pi x))`` selected by
the binary digits of ``n``.  On the grid of ``2**N`` cells, ``w_{2^k}`` reads
binary digit ``k+1`` of ``x``, i.e. bit ``N-1-k`` of the cell index, so the
Paley transform is the natural-order Hadamard transform of the bit-reversed
signal.  Both transforms act on the last axis and accept batches.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .dyadic import DyadicInterval, FrequencyInterval, resolution


@lru_cache(maxsize=None)
def bit_reversal(N: int) -> np.ndarray:
    idx = np.arange(1 << N)
    rev = np.zeros_like(idx)
    for b in range(N):
        rev |= ((idx >> b) & 1) << (N - 1 - b)
    rev.setflags(write=False)
    return rev


def _hadamard(x: np.ndarray) -> np.ndarray:
    """Unnormalized natural-order butterfly on the last axis, O(N 2^N)."""
    x = np.array(x, dtype=float, copy=True)
    shape = x.shape
    n = shape[-1]
    lead = shape[:-1]
    h = 1
    while h < n:
        y = x.reshape(*lead, n // (2 * h), 2, h)
        a = y[..., 0, :]
        b = y[..., 1, :]
        x = np.stack((a + b, a - b), axis=-2).reshape(shape)
        h *= 2
    return x


def _level(n: int) -> int:
    N = int(n).bit_length() - 1
    if n < 1 or (1 << N) != n:
        raise ValueError(f"length {n} is not a power of two")
    return N


def local_forward(x) -> np.ndarray:
    """Paley transform on the last axis for any power-of-two length, 1 included.

    Used for the rescaled transform of a restriction to a dyadic interval.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    N = _level(n)
    return _hadamard(x[..., bit_reversal(N)]) / n


def local_inverse(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    return _hadamard(c)[..., bit_reversal(_level(c.shape[-1]))]


def walsh_forward(f) -> np.ndarray:
    """Coefficients ``f^(n) = <f, w_n> = 2^-N sum_i f_i w_n(x_i)``."""
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    return _hadamard(f[..., bit_reversal(N)]) / (1 << N)


def walsh_inverse(coeffs) -> np.ndarray:
    """Signal ``sum_n c_n w_n``."""
    c = np.asarray(coeffs, dtype=float)
    N = resolution(c)
    return _hadamard(c)[..., bit_reversal(N)]


@lru_cache(maxsize=4096)
def _walsh_cached(n: int, N: int) -> np.ndarray:
    parity = np.bitwise_count(np.bitwise_and(bit_reversal(N), n)) & 1
    w = 1.0 - 2.0 * parity
    w.setflags(write=False)
    return w


def walsh_function(n: int, N: int) -> np.ndarray:
    """Cell values of ``w_n`` at resolution ``N`` (requires ``n < 2^N``)."""
    if not 0 <= n < (1 << N):
        raise ValueError(f"frequency {n} not resolved at N={N}")
    return _walsh_cached(int(n), int(N))


def modulate(f, m: int) -> np.ndarray:
    """Pointwise product ``w_m f``; its spectrum is ``n -> f^(n XOR m)``."""
    f = np.asarray(f, dtype=float)
    return f * walsh_function(m, resolution(f))


def frequency_mask(omega: FrequencyInterval, N: int) -> np.ndarray:
    if omega.b > (1 << N):
        raise ValueError(f"{omega} exceeds [0, 2^{N})")
    return omega.indicator(N)


def project(f, omega: FrequencyInterval) -> np.ndarray:
    """Walsh projection ``T_omega f``."""
    if omega is None:
        raise ValueError("empty frequency interval")
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    return walsh_inverse(walsh_forward(f) * frequency_mask(omega, N))


def conditional_expectation(f, k: int) -> np.ndarray:
    """Block averages at scale ``2^-k``, the same operator as ``T_[0,2^k)``."""
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    rows = f.reshape(*f.shape[:-1], 1 << k, -1)
    return np.repeat(rows.mean(axis=-1), 1 << (N - k), axis=-1)


# --- Haar system -----------------------------------------------------------

def haar_forward(f) -> tuple[float, list[np.ndarray]]:
    """Mean and orthonormal Haar coefficients.

    Returns ``(mean, coeffs)`` with ``coeffs[j][k] = <f, h_I>`` for
    ``I = [k 2^-j, (k+1) 2^-j)``, ``0 <= j < N``, and
    ``h_I = (1_{I-} - 1_{I+}) / sqrt(|I|)``.
    """
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    mass = f / (1 << N)
    coeffs: list[np.ndarray] = [None] * N  # type: ignore[list-item]
    for j in range(N - 1, -1, -1):
        pairs = mass.reshape(-1, 2)
        coeffs[j] = (pairs[:, 0] - pairs[:, 1]) * 2.0 ** (j / 2)
        mass = pairs.sum(axis=1)
    return float(mass[0]), coeffs


def haar_inverse(mean: float, coeffs) -> np.ndarray:
    values = np.array([mean], dtype=float)
    for j, c in enumerate(coeffs):
        c = np.asarray(c, dtype=float)
        d = c * 2.0 ** (j / 2)
        values = np.stack((values + d, values - d), axis=1).reshape(-1)
    return values


def haar_function(I: DyadicInterval, N: int) -> np.ndarray:
    if I.level >= N:
        raise ValueError(f"Haar function of {I} is not resolved at N={N}")
    h = np.zeros(1 << N)
    s = I.cells(N)
    mid = (s.start + s.stop) // 2
    h[s.start:mid] = 1.0
    h[mid:s.stop] = -1.0
    return h / np.sqrt(I.length)


def haar_square_function(f, include_mean: bool = True) -> np.ndarray:
    """Dyadic martingale square function computed from Haar coefficients."""
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    mean, coeffs = haar_forward(f)
    sq = np.full(1 << N, mean ** 2 if include_mean else 0.0)
    for j, c in enumerate(coeffs):
        sq += np.repeat(c ** 2 * 2.0 ** j, 1 << (N - j))
    return np.sqrt(sq)


def spectrum_to_json(coeffs) -> dict:
    c = np.asarray(coeffs, dtype=float)
    return {"N": resolution(c), "coeffs": [float(x) for x in c]}


def spectrum_from_json(obj: dict) -> np.ndarray:
    c = np.asarray(obj["coeffs"], dtype=float)
    if resolution(c) != int(obj["N"]):
        raise ValueError("coefficient count does not match N")
    return c
