"""Local Luxemburg norms for L(log L)^{1/2} and exp(L^2)."""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .dyadic import UNIT, DyadicInterval, resolution


def psi2(x):
    x = np.abs(x)
    return x * np.sqrt(np.log(2.0 + x))


def exp_l2(x):
    with np.errstate(over="ignore"):
        return np.expm1(np.square(x))


ORLICZ = {"psi2": psi2, "expL2": exp_l2}


def _inverse_at_one(psi) -> float:
    lo, hi = 0.0, 1.0
    while psi(hi) < 1.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if psi(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    return hi


# psi^{-1}(1): a constant c has norm |c| / psi^{-1}(1)
INVERSE_AT_ONE = {name: _inverse_at_one(fn) for name, fn in ORLICZ.items()}


def luxemburg_rows(rows, psi: str = "psi2", rtol: float = 1e-10, max_iter: int = 200) -> np.ndarray:
    """Luxemburg norm of each row with respect to its normalized counting measure.

    Solves ``mean(psi(|row| / lam)) = 1`` by bisection in ``log lam`` inside
    ``[mean|row|, max|row|] / psi^{-1}(1)``: Jensen gives the lower end, the
    sup bound the upper end, and the map is decreasing in ``lam``.
    """
    fn = ORLICZ[psi]
    a = np.abs(np.atleast_2d(np.asarray(rows, dtype=float)))
    inv1 = INVERSE_AT_ONE[psi]
    lo = a.mean(axis=1) / inv1
    hi = a.max(axis=1) / inv1
    out = np.zeros(len(a))
    live = hi > 0
    a, lo, hi = a[live], lo[live], hi[live]
    for _ in range(max_iter):
        active = hi > lo * (1.0 + rtol)
        if not active.any():
            break
        mid = np.sqrt(lo * hi)
        with np.errstate(over="ignore", invalid="ignore"):
            phi = fn(a / mid[:, None]).mean(axis=1)
        above = phi > 1.0
        lo = np.where(active & above, mid, lo)
        hi = np.where(active & ~above, mid, hi)
    out[live] = hi
    return out


def luxemburg(f, I: DyadicInterval = UNIT, psi: str = "psi2") -> float:
    """``<f>_{I, psi(L)}``: Luxemburg norm of ``f 1_I`` w.r.t. ``dx/|I|``."""
    N = resolution(f)
    return float(luxemburg_rows(np.asarray(f, dtype=float)[I.cells(N)][None, :], psi)[0])


def luxemburg_levels(f, root: DyadicInterval = UNIT, psi: str = "psi2") -> dict[int, np.ndarray]:
    """Norms on every dyadic subinterval of ``root``, keyed by absolute level."""
    N = resolution(f)
    local = np.asarray(f, dtype=float)[root.cells(N)]
    out = {}
    for level in range(root.level, N + 1):
        out[level] = luxemburg_rows(local.reshape(1 << (level - root.level), -1), psi)
    return out


@dataclass
class SupInfReport:
    exp_moment_sup: float       # sup_p p^{-1/2} <f>_{I,p}
    exp_argmax_p: float
    exp_luxemburg: float
    exp_ratio: float            # moment proxy / exp(L^2) norm
    psi_moment_inf: float       # inf_q (q-1)^{-1/2} <f>_{I,q}
    psi_argmin_q: float
    psi_luxemburg: float
    psi_ratio: float            # psi2 norm / moment proxy

    def to_dict(self) -> dict:
        return asdict(self)


def supinf_comparison(f, I: DyadicInterval = UNIT, p_max: float = 64.0,
                      points: int = 40) -> SupInfReport:
    """Compare Luxemburg norms with their moment characterizations.

    ``p`` runs over a geometric grid in ``(1, p_max]`` and ``q - 1`` over a
    geometric grid in ``[1e-3, 1]``; the sup in ``p`` is truncated at ``p_max``.
    """
    N = resolution(f)
    a = np.abs(np.asarray(f, dtype=float)[I.cells(N)])
    ps = np.geomspace(1.0 + 1e-3, p_max, points)
    qs = 1.0 + np.geomspace(1e-3, 1.0, points)
    scale = a.max() if a.max() > 0 else 1.0
    b = a / scale
    mom_p = np.array([np.mean(b ** p) ** (1.0 / p) for p in ps]) * scale
    mom_q = np.array([np.mean(b ** q) ** (1.0 / q) for q in qs]) * scale
    ex = mom_p / np.sqrt(ps)
    ps_ = mom_q / np.sqrt(qs - 1.0)
    i, k = int(np.argmax(ex)), int(np.argmin(ps_))
    lux_e = luxemburg(f, I, "expL2")
    lux_p = luxemburg(f, I, "psi2")
    return SupInfReport(
        exp_moment_sup=float(ex[i]), exp_argmax_p=float(ps[i]), exp_luxemburg=lux_e,
        exp_ratio=float(ex[i] / lux_e) if lux_e > 0 else float("nan"),
        psi_moment_inf=float(ps_[k]), psi_argmin_q=float(qs[k]), psi_luxemburg=lux_p,
        psi_ratio=float(lux_p / ps_[k]) if ps_[k] > 0 else float("nan"),
    )
