"""Reproducible experiments: the extremal pair for multipliers near L^1,
lacunary coefficient and exponential-square scans, and q-scaling tables.

Random families are seeded and described by parameters that do not depend
on the resolution, so the same family can be sampled at several ``N``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .dyadic import UNIT, resolution
from .multipliers import AtomRq1, MultiplierSymbol, apply, random_atom
from .orlicz import luxemburg
from .squares import s_lambda
from .walsh import haar_function, walsh_forward, walsh_function


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


# --- the extremal pair -----------------------------------------------------------

def rademacher_multiplier(n: int) -> MultiplierSymbol:
    """``sum_{k<n} 1_{{2^k}}``."""
    return MultiplierSymbol(tuple(((1 << k, (1 << k) + 1), 1.0) for k in range(n)))


def rademacher_atom(n: int, q: float) -> AtomRq1:
    """The same symbol as an atom with one jump interval per block."""
    return AtomRq1(q, 1, {k + 1: [(1 << k, (1 << k) + 1)] for k in range(n)})


@dataclass
class LowerBoundReport:
    n: int
    N: int
    q: float
    pairing: float
    pairing_exact: float
    norm_f: float
    norm_g: float
    ratio: float
    ratio_exact: float
    scaled_q: float             # (q-1) ratio
    scaled_sqrt: float          # sqrt(q-1) ratio
    character_error: float      # ||T_m f - sum w_{2^k}||_inf
    level_set_error: int        # cells where {T_m f = -n} differs from the last 2^{N-n} cells
    g_norm_identity_error: float

    def to_dict(self) -> dict:
        return asdict(self)


def lower_bound_lerner(n: int, N: int | None = None) -> LowerBoundReport:
    """``f = 2^n 1_[0, 2^-n)``, ``m = sum_{k<n} 1_{{2^k}}`` and ``g`` the
    indicator of ``{T_m f = -n}``; the pairing is ``-n 2^-n`` and with
    ``q = 1 + 1/n`` the ratio ``|<T_m f, g>| / (||f||_q ||g||_q)`` is
    ``n 2^{-2n/(n+1)}``."""
    if n < 1:
        raise ValueError("n must be positive")
    N = n + 2 if N is None else N
    if N < n + 1:
        raise ValueError(f"resolution {N} too small for n={n}")
    f = np.zeros(1 << N)
    f[: 1 << (N - n)] = 2.0 ** n
    Tf = apply(rademacher_multiplier(n), f)
    chars = sum(walsh_function(1 << k, N) for k in range(n))
    g = (np.abs(Tf + n) < 0.5).astype(float)
    expected = np.zeros(1 << N)
    expected[(1 << N) - (1 << (N - n)):] = 1.0
    q = 1.0 + 1.0 / n
    pairing = float(np.dot(Tf, g)) / (1 << N)
    nf = float(np.mean(np.abs(f) ** q) ** (1 / q))
    ng = float(np.mean(np.abs(g) ** q) ** (1 / q))
    ratio = abs(pairing) / (nf * ng)
    ratio_exact = n * 2.0 ** (-2.0 * n / (n + 1))
    return LowerBoundReport(
        n=n, N=N, q=q, pairing=pairing, pairing_exact=-n * 2.0 ** -n,
        norm_f=nf, norm_g=ng, ratio=ratio, ratio_exact=ratio_exact,
        scaled_q=(q - 1) * ratio, scaled_sqrt=math.sqrt(q - 1) * ratio,
        character_error=float(np.abs(Tf - chars).max()),
        level_set_error=int(np.sum(g != expected)),
        g_norm_identity_error=abs(2.0 ** n * ng - nf) / nf,
    )


# --- seeded families -------------------------------------------------------------

def _midpoints(N: int) -> np.ndarray:
    return (np.arange(1 << N) + 0.5) / (1 << N)


def scan_family(N: int, seed: int = 0, size: int = 6, coarse: int = 8,
                mean_zero: bool = False) -> dict[str, np.ndarray]:
    """Resolution-independent test functions.

    Walsh polynomials with frequencies below ``2^coarse`` and indicators of
    intervals of length at least ``2^-coarse`` are exact at every
    ``N >= coarse``; the singular powers ``|x - c|^-beta`` are sampled at
    cell midpoints.
    """
    if N < coarse:
        raise ValueError(f"family needs N >= {coarse}")
    rng = np.random.default_rng(seed)
    x = _midpoints(N)
    fam = {}
    for i in range(size):
        freqs = rng.choice(1 << coarse, size=8, replace=False)
        coef = rng.standard_normal(8)
        fam[f"walsh_poly_{i}"] = sum(c * walsh_function(int(k), N) for c, k in zip(coef, freqs))
    for i in range(size):
        coef = rng.standard_normal(coarse)
        fam[f"lacunary_{i}"] = sum(c * walsh_function(1 << k, N) for k, c in enumerate(coef))
    for i in range(size):
        c, beta = rng.random(), 0.2 + 0.25 * rng.random()
        fam[f"singular_{i}"] = np.abs(x - c) ** -beta
    for n in range(1, coarse + 1):
        f = np.zeros(1 << N)
        f[: 1 << (N - n)] = 2.0 ** n
        fam[f"indicator_{n}"] = f
    if mean_zero:
        fam = {k: v - v.mean() for k, v in fam.items()}
        fam = {k: v for k, v in fam.items() if np.abs(v).max() > 1e-12}
    return fam


def random_signal(rng: np.random.Generator, N: int) -> np.ndarray:
    """A mix of Gaussian, heavy-tailed, spiky and bump signals."""
    kind = rng.integers(4)
    if kind == 0:
        return rng.standard_normal(1 << N)
    if kind == 1:
        return rng.standard_cauchy(1 << N)
    if kind == 2:
        f = rng.standard_normal(1 << N)
        spikes = rng.choice(1 << N, size=int(rng.integers(1, 6)), replace=False)
        f[spikes] += rng.choice([-1, 1], size=len(spikes)) * 2.0 ** (N / 2) * (1 + rng.random(len(spikes)))
        return f
    f = 0.1 * rng.standard_normal(1 << N)
    for _ in range(int(rng.integers(1, 4))):
        level = int(rng.integers(2, N + 1))
        k = int(rng.integers(1 << level))
        f[k << (N - level):(k + 1) << (N - level)] += 2.0 ** level * rng.choice([-1, 1])
    return f


# --- Zygmund and exponential-square scans ---------------------------------------------

def check_lacunary(lacunary) -> float:
    """Return ``inf lambda_{k+1} / lambda_k``; raise unless it exceeds 1."""
    lac = [int(x) for x in lacunary]
    if not lac or lac[0] < 1:
        raise ValueError("lacunary frequencies must be positive")
    if len(lac) == 1:
        return math.inf
    rho = min(b / a for a, b in zip(lac, lac[1:]))
    if rho <= 1:
        raise ValueError(f"sequence is not lacunary (ratio {rho})")
    return rho


@dataclass
class ScanReport:
    kind: str
    N: int
    seed: int
    rows: list[dict]
    max_ratio: float
    argmax: str
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


def lacunary_l2(f, lacunary) -> float:
    coef = walsh_forward(f)
    lac = [k for k in lacunary if k < len(coef)]
    return float(np.sqrt(np.sum(coef[lac] ** 2)))


def zygmund_scan(lacunary, family: dict[str, np.ndarray], seed: int = 0) -> ScanReport:
    """``||{f^(lambda_k)}||_l2 / <f>_{psi2}`` for every family member."""
    rho = check_lacunary(lacunary)
    rows = []
    N = None
    for name, f in family.items():
        N = resolution(f)
        l2 = lacunary_l2(f, lacunary)
        norm = luxemburg(f, UNIT, "psi2")
        rows.append({"name": name, "l2": l2, "psi2": norm, "ratio": l2 / norm if norm > 0 else 0.0})
    best = max(rows, key=lambda r: r["ratio"])
    return ScanReport("zygmund", N, seed, rows, best["ratio"], best["name"], {"rho": rho})


def cww_scan(family: dict[str, np.ndarray], seed: int = 0, tol: float = 1e-10) -> ScanReport:
    """``<f>_{exp(L^2)} / ||S_2 f||_inf`` for mean-zero family members."""
    rows = []
    N = None
    for name, f in family.items():
        N = resolution(f)
        if abs(f.mean()) > tol * max(1.0, float(np.abs(f).max())):
            raise ValueError(f"{name} does not have mean zero")
        sq = float(s_lambda(f, 2).max())
        norm = luxemburg(f, UNIT, "expL2")
        rows.append({"name": name, "square_sup": sq, "expL2": norm,
                     "ratio": norm / sq if sq > 0 else 0.0})
    best = max(rows, key=lambda r: r["ratio"])
    return ScanReport("cww", N, seed, rows, best["ratio"], best["name"])


def rademacher_sum(signs, N: int) -> np.ndarray:
    return sum(s * walsh_function(1 << k, N) for k, s in enumerate(signs))


def haar_unit(N: int) -> np.ndarray:
    return haar_function(UNIT, N)


# --- q scaling ---------------------------------------------------------------------

def q_scaling_table(trials: int = 10, q_grid=(1.1, 1.25, 1.5, 2.0), N: int = 10,
                    seed: int = 0, ns=(4, 6, 8)) -> list[dict]:
    """Ratios next to their ``(q-1)`` and ``sqrt(q-1)`` normalizations.

    Rows of source ``extremal`` use the extremal pair at ``q = 1 + 1/n``
    (norm ratio and certificate ratio); rows of source ``random`` give the
    largest certificate ratio over seeded random atoms at each grid value.
    """
    from .sparse import sparse_certify_multiplier

    rows = []
    for n in ns:
        rep = lower_bound_lerner(n, max(N, n + 2))
        f = np.zeros(1 << rep.N)
        f[: 1 << (rep.N - n)] = 2.0 ** n
        g = np.zeros(1 << rep.N)
        g[(1 << rep.N) - (1 << (rep.N - n)):] = 1.0
        cert = sparse_certify_multiplier(f, g, rademacher_atom(n, rep.q), rep.q)
        rows.append({"source": "extremal", "n": n, "q": rep.q, "ratio": rep.ratio,
                     "ratio_q": rep.scaled_q, "ratio_sqrt": rep.scaled_sqrt,
                     "certificate_ratio": cert.ratio})
    for q in q_grid:
        rng = np.random.default_rng([seed, int(round(q * 1000))])
        worst = 0.0
        for _ in range(trials):
            m = random_atom(rng, N, int(rng.choice([1, 2, 4])), q, max_block=8)
            cert = sparse_certify_multiplier(random_signal(rng, N), random_signal(rng, N), m, q)
            worst = max(worst, cert.ratio)
        rows.append({"source": "random", "n": 0, "q": q, "ratio": worst,
                     "ratio_q": (q - 1) * worst, "ratio_sqrt": math.sqrt(q - 1) * worst,
                     "certificate_ratio": worst})
    return rows



# --- randomized trial suites -----------------------------------------------------------

TRIAL_QS = (1.25, 1.5, 2.0)


def random_good_collection(rng: np.random.Generator, N: int, fill: float = 0.6):
    from .squares import GoodCollection

    ivs = []
    for k in range(N):
        if rng.random() < fill:
            ivs.append(((1 << k), (1 << k) + int(rng.integers(1, (1 << k) + 1))))
    return GoodCollection(tuple(ivs))


def random_block_sign_symbol(rng: np.random.Generator, N: int) -> MultiplierSymbol:
    """``sum_k sigma_k 1_[2^k, nu_k)`` with random signs and endpoints."""
    pieces = []
    for k in range(N):
        s = float(rng.choice([-1, 0, 1]))
        if s:
            nu = (1 << k) + int(rng.integers(1, (1 << k) + 1))
            pieces.append(((1 << k, nu), s))
    return MultiplierSymbol(tuple(pieces))


def key_decomposition_trials(count: int = 200, N: int = 10, seed: int = 0) -> list[dict]:
    """Key decompositions on random signals and atoms with the maximal
    threshold-4 stopping family, in psi2 mode and in L^q mode for each
    ``q`` in ``TRIAL_QS``."""
    from .sparse import check_stopping_condition, key_decomposition, maximal_intervals

    rng = np.random.default_rng(seed)
    out = []
    for t in range(count):
        f = random_signal(rng, N)
        J = int(rng.choice([1, 2, 4]))
        q = float(TRIAL_QS[t % len(TRIAL_QS)])
        m = random_atom(rng, N, J, q)
        norm_f = float(np.sqrt(np.mean(f ** 2)))
        for mode in ("psi2", q):
            S = maximal_intervals(f, UNIT, mode)
            chk = check_stopping_condition(f, UNIT, S, mode, C=math.inf)
            kd = key_decomposition(f, UNIT, m, S, mode)
            row = {"trial": t, "J": J, "mode": "psi2" if mode == "psi2" else f"L{q}",
                   "intervals": len(S), "stopping_total": chk.total, "norm_f": norm_f}
            row.update(kd.report)
            out.append(row)
    return out


def multiplier_certificate_trials(count: int = 200, N: int = 10, seed: int = 0,
                                  calibration: dict | None = None):
    from .sparse import sparse_certify_multiplier

    rng = np.random.default_rng(seed)
    qs = (1.1, 1.5, 2.0)
    for t in range(count):
        q = qs[t % 3]
        m = random_atom(rng, N, int(rng.choice([1, 2, 4])), q)
        f, phi = random_signal(rng, N), random_signal(rng, N)
        yield sparse_certify_multiplier(f, phi, m, q, calibration=calibration)


def square_certificate_trials(count: int = 200, N: int = 10, seed: int = 0,
                              calibration: dict | None = None):
    """Square-function certificates over random good collections, martingale
    grids, the pieces of ``S_lambda`` and block-sign compositions."""
    from .sparse import sparse_certify_composition, sparse_certify_square
    from .squares import MartingaleGrid, reduce_s_lambda

    rng = np.random.default_rng(seed)
    rs = (1.0, 1.5, 2.0)
    for t in range(count):
        r = rs[t % 3]
        f, g = random_signal(rng, N), random_signal(rng, N)
        kind = t % 4
        if kind == 0:
            omega = random_good_collection(rng, N)
        elif kind == 1:
            pts = sorted(rng.choice(np.arange(N + 1), size=int(rng.integers(2, N + 2)), replace=False))
            omega = MartingaleGrid(tuple(1 << int(p) for p in pts))
        elif kind == 2:
            red = reduce_s_lambda(int(rng.integers(3, 8)), N)
            omega = [red.martingale, red.right, red.left][int(rng.integers(3))]
        else:
            yield sparse_certify_composition(f, g, random_block_sign_symbol(rng, N), r,
                                             calibration=calibration)
            continue
        yield sparse_certify_square(f, g, omega, r, calibration=calibration)


def weighted_trials(N: int = 10, p: float = 2.5, lams=(2, 3), constant: float = 1.0,
                    seed: int = 0) -> dict:
    """Power-weight scans of ``S_lambda`` against ``constant [w]_{A_p}^{3/2}``."""
    from .weights import power_weight_scan

    out = {}
    for lam in lams:
        scan = power_weight_scan(lambda f, lam=lam: s_lambda(f, lam), p, N, seed=seed,
                                 exponent=1.5, constant=constant)
        out[f"s_lambda_{lam}"] = scan
    return out
