"""Dyadic Muckenhoupt characteristics and weighted norm-ratio scans."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dyadic import resolution

FAMILY_VERSION = 1


def _check_weight(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    resolution(w)
    if not np.all(w > 0):
        raise ValueError("weights must be strictly positive")
    return w


def _dyadic_means(x: np.ndarray):
    """Yield the averages of ``x`` over every dyadic level, coarsest first."""
    N = resolution(x)
    for level in range(N + 1):
        yield x.reshape(1 << level, -1).mean(axis=1)


def ap_characteristic(w, p: float) -> float:
    """``sup_I <w>_I <w^{1-p'}>_I^{p-1}`` over dyadic ``I``."""
    if p <= 1:
        raise ValueError("A_p needs p > 1")
    w = _check_weight(w)
    sigma = w ** (-1.0 / (p - 1.0))
    return float(max(np.max(a * b ** (p - 1.0))
                     for a, b in zip(_dyadic_means(w), _dyadic_means(sigma))))


def a1_characteristic(w) -> float:
    """``sup_I <w>_I / inf_I w`` over dyadic ``I``."""
    w = _check_weight(w)
    N = resolution(w)
    best = 1.0
    for level in range(N + 1):
        rows = w.reshape(1 << level, -1)
        best = max(best, float(np.max(rows.mean(axis=1) / rows.min(axis=1))))
    return best


def rh_characteristic(w, q: float) -> float:
    """Reverse Hölder: ``sup_I <w>_{I,q} / <w>_I`` over dyadic ``I``."""
    if q <= 1:
        raise ValueError("reverse Hölder needs q > 1")
    w = _check_weight(w)
    return float(max(np.max(b ** (1.0 / q) / a)
                     for a, b in zip(_dyadic_means(w), _dyadic_means(w ** q))))


def power_weight(alpha: float, N: int) -> np.ndarray:
    """``x^alpha`` sampled at cell midpoints."""
    x = (np.arange(1 << N) + 0.5) / (1 << N)
    return x ** alpha


def weighted_norm(f, w, p: float) -> float:
    return float(np.mean(np.abs(f) ** p * w) ** (1.0 / p))


def reference_family(N: int, seed: int = 0, size: int = 4) -> dict[str, np.ndarray]:
    """Fixed family: normalized indicators, Gaussian signals and Rademacher sums."""
    from .walsh import walsh_function

    rng = np.random.default_rng(seed)
    fam = {}
    for n in range(0, N, 2):
        f = np.zeros(1 << N)
        f[: 1 << (N - n)] = 2.0 ** n
        fam[f"indicator_{n}"] = f
    for i in range(size):
        fam[f"gauss_{i}"] = rng.standard_normal(1 << N)
    rad = np.array([walsh_function(1 << k, N) for k in range(N)])
    for i in range(size):
        fam[f"rademacher_{i}"] = rng.choice([-1.0, 1.0], size=N) @ rad
    return fam


@dataclass
class WeightedReport:
    p: float
    characteristic: float
    max_ratio: float
    argmax: str
    ceiling_multiplier: float   # [w]^{(3/2) max(1, 1/(p-1))}
    ceiling_square: float       # [w]^{max(1, 3/(2(p-1)))}
    ratios: dict[str, float] = field(default_factory=dict)


def weighted_norm_ratio(op: Callable[[np.ndarray], np.ndarray], w, p: float,
                        family: dict[str, np.ndarray]) -> WeightedReport:
    """Largest ``||op f||_{L^p(w)} / ||f||_{L^p(w)}`` over the family, next to
    the predicted growth in the A_p characteristic (constants omitted)."""
    w = _check_weight(w)
    ratios = {}
    for name, f in family.items():
        den = weighted_norm(f, w, p)
        if den > 0:
            ratios[name] = weighted_norm(op(f), w, p) / den
    name = max(ratios, key=ratios.get)
    char = ap_characteristic(w, p)
    return WeightedReport(
        p=p, characteristic=char, max_ratio=ratios[name], argmax=name,
        ceiling_multiplier=char ** (1.5 * max(1.0, 1.0 / (p - 1.0))),
        ceiling_square=char ** max(1.0, 1.5 / (p - 1.0)),
        ratios=ratios,
    )


@dataclass
class PowerWeightScan:
    p: float
    exponent: float             # ceiling exponent tested against
    rows: list[dict]
    fitted_exponent: float      # slope of log ratio against log [w]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["weight_id", "characteristic", "ratio", "ceiling"])
        for r in self.rows:
            w.writerow([r["weight_id"], repr(r["characteristic"]), repr(r["ratio"]), repr(r["ceiling"])])
        return buf.getvalue()


def power_weight_scan(op, p: float, N: int, alphas=None, seed: int = 0,
                      exponent: float = 1.5, constant: float = 1.0) -> PowerWeightScan:
    """Norm ratios of ``op`` on ``L^p(x^alpha)`` across a grid of exponents
    ``alpha`` in ``(-1, p-1)``, with the ceiling ``constant [w]^exponent``."""
    if alphas is None:
        alphas = np.linspace(-0.9, (p - 1.0) * 0.9, 12)
    fam = reference_family(N, seed)
    rows = []
    for a in alphas:
        rep = weighted_norm_ratio(op, power_weight(float(a), N), p, fam)
        rows.append({"weight_id": f"power_{a:+.4f}", "alpha": float(a),
                     "characteristic": rep.characteristic, "ratio": rep.max_ratio,
                     "ceiling": constant * rep.characteristic ** exponent})
    x = np.log([r["characteristic"] for r in rows])
    y = np.log([r["ratio"] for r in rows])
    slope = float(np.polyfit(x, y, 1)[0]) if np.ptp(x) > 0 else 0.0
    return PowerWeightScan(p, exponent, rows, slope)
