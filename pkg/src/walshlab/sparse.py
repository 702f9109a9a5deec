"""Multi-frequency Calderón-Zygmund decomposition and recursive sparse
certificates for Walsh multipliers and square functions.

Every recursion node works on the restriction of the data to its interval
``I0`` at local resolution ``N - level(I0)``.  A multiplier adapted to ``I0``
acts there diagonally in the local Walsh basis, so all node computations use
local transforms of length ``|I0| 2^N``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import UNIT, DyadicInterval, FrequencyInterval, level_averages, resolution
from .multipliers import AtomRq1, MultiplierSymbol, induce, jump_tile_mask
from .orlicz import luxemburg_levels, luxemburg_rows
from .squares import GoodCollection, MartingaleGrid, reduce_s_lambda, s_lambda
from .walsh import haar_square_function, local_forward, local_inverse

STOPPING_THRESHOLD = 4.0
EXACT_TOL = 1e-10


# --- stopping collections ----------------------------------------------------

@dataclass(frozen=True)
class StoppingCollection:
    """Pairwise disjoint dyadic intervals strictly inside ``root``."""

    root: DyadicInterval
    intervals: tuple[DyadicInterval, ...]

    def __post_init__(self):
        ivs = tuple(sorted(self.intervals, key=lambda I: (I.left, I.level)))
        for I in ivs:
            if I == self.root or not self.root.contains(I):
                raise ValueError(f"{I} is not strictly inside {self.root}")
        for I, J in zip(ivs, ivs[1:]):
            if I.contains(J) or J.contains(I):
                raise ValueError(f"{I} and {J} are not disjoint")
        object.__setattr__(self, "intervals", ivs)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def measure(self) -> float:
        return sum(I.length for I in self.intervals)


def _local_averages(f_loc: np.ndarray, root: DyadicInterval, N: int, norm) -> dict[int, np.ndarray]:
    """Averages of ``f`` on every subinterval of ``root``, keyed by level."""
    out = {}
    for level in range(root.level, N + 1):
        rows = f_loc.reshape(1 << (level - root.level), -1)
        if norm == "psi2":
            out[level] = luxemburg_rows(rows, "psi2")
        else:
            a = np.abs(rows)
            out[level] = np.mean(a ** norm, axis=1) ** (1.0 / norm)
    return out


def _maximal(exceed: dict[int, np.ndarray], root: DyadicInterval, N: int) -> list[DyadicInterval]:
    chosen = []
    blocked = np.zeros(1, dtype=bool)
    for level in range(root.level + 1, N + 1):
        blocked = np.repeat(blocked, 2)
        hit = exceed[level] & ~blocked
        base = root.index << (level - root.level)
        chosen.extend(DyadicInterval(level, base + int(i)) for i in np.nonzero(hit)[0])
        blocked |= hit
    return chosen


def maximal_intervals(f, root: DyadicInterval = UNIT, norm="psi2",
                      threshold: float = STOPPING_THRESHOLD) -> StoppingCollection:
    """Maximal dyadic ``I ⊊ root`` with ``<f>_I > threshold <f>_root``.

    ``norm`` is ``"psi2"`` for the L(log L)^{1/2} average or an exponent ``q``.
    """
    N = resolution(f)
    f_loc = np.asarray(f, dtype=float)[root.cells(N)]
    av = _local_averages(f_loc, root, N, norm)
    top = av[root.level][0]
    exceed = {lv: (a > threshold * top) if top > 0 else np.zeros(len(a), bool)
              for lv, a in av.items()}
    return StoppingCollection(root, tuple(_maximal(exceed, root, N)))


@dataclass
class StoppingCheck:
    passed: bool
    outside_sup: float      # sup of |f| off the union, over <f>_root
    inside_sup: float       # sup of <f>_I over the collection, over <f>_root
    total: float
    C: float
    root_average: float


def check_stopping_condition(f, root: DyadicInterval, S, norm="psi2", C: float = 12.0) -> StoppingCheck:
    """``sup_{root \\ ∪S} |f| + sup_{I∈S} <f>_I <= C <f>_root`` in normalized form."""
    N = resolution(f)
    f = np.asarray(f, dtype=float)
    S = S if isinstance(S, StoppingCollection) else StoppingCollection(root, tuple(S))
    f_loc = f[root.cells(N)]
    top = _avg(f_loc, norm)
    off = np.ones(len(f_loc), dtype=bool)
    inside = 0.0
    for I in S:
        s = _rel_slice(I, root, N)
        off[s] = False
        inside = max(inside, _avg(f_loc[s], norm))
    outside = float(np.abs(f_loc[off]).max()) if off.any() else 0.0
    if top == 0:
        ok = outside == 0 and inside == 0
        return StoppingCheck(ok, 0.0 if ok else math.inf, 0.0, 0.0 if ok else math.inf, C, 0.0)
    total = (outside + inside) / top
    return StoppingCheck(total <= C, outside / top, inside / top, total, C, top)


def _avg(x: np.ndarray, norm) -> float:
    if norm == "psi2":
        return float(luxemburg_rows(x[None, :], "psi2")[0])
    return float(np.mean(np.abs(x) ** norm) ** (1.0 / norm))


def _rel_slice(I: DyadicInterval, root: DyadicInterval, N: int) -> slice:
    w = 1 << (N - I.level)
    off = (I.index - (root.index << (I.level - root.level))) * w
    return slice(off, off + w)


# --- key decomposition --------------------------------------------------------

def _group_by_level(intervals):
    groups: dict[int, list[DyadicInterval]] = {}
    for I in intervals:
        groups.setdefault(I.level, []).append(I)
    return groups


def _split_local(f_loc, root, children, omegas, N):
    """Local pieces ``f_inf``, ``f_I`` (jump tiles) and ``f'_I`` (other tiles)."""
    f_inf = f_loc.copy()
    jump, rest = {}, {}
    for level, group in _group_by_level(children).items():
        rows = f_loc.reshape(1 << (level - root.level), -1)
        idx = [I.index - (root.index << (level - root.level)) for I in group]
        coef = local_forward(rows[idx])
        mask = jump_tile_mask(omegas, level, coef.shape[-1])
        fj = local_inverse(coef * mask)
        fr = local_inverse(coef * ~mask)
        for n, I in enumerate(group):
            jump[I] = fj[n]
            rest[I] = fr[n]
            f_inf[_rel_slice(I, root, N)] = 0.0
    return f_inf, jump, rest


def _embed(pieces: dict, root, N, n0) -> tuple[list[DyadicInterval], np.ndarray]:
    keys = list(pieces)
    out = np.zeros((len(keys), n0))
    for i, I in enumerate(keys):
        out[i, _rel_slice(I, root, N)] = pieces[I]
    return keys, out


@dataclass
class KeyDecomposition:
    """``f = f_inf + sum_I (f_I + f'_I)`` with the observed constants."""

    root: DyadicInterval
    f_inf: np.ndarray
    parts: dict[DyadicInterval, tuple[np.ndarray, np.ndarray]]
    report: dict

    @property
    def f_tilde(self) -> np.ndarray:
        out = self.f_inf.copy()
        for fi, _ in self.parts.values():
            out += fi
        return out

    def reconstruct(self) -> np.ndarray:
        out = self.f_inf.copy()
        for fi, fp in self.parts.values():
            out += fi + fp
        return out


def _symbol_on(m, I: DyadicInterval, N: int) -> np.ndarray:
    """Values of an ``I``-adapted multiplier on the tiles of ``P(I)``."""
    return m.values(N)[:: 1 << I.level]


def _apply_local(symbol_loc: np.ndarray, g_loc: np.ndarray) -> np.ndarray:
    return local_inverse(local_forward(g_loc) * symbol_loc)


def _decomposition_constants(f_loc, root, N, jump, m, J, norm, q=None):
    """Observed constants of the key decomposition, normalized by ``<f>_root``."""
    top = _avg(f_loc, norm)
    if top == 0:
        return {"root_average": 0.0}
    f_inf_sup = 0.0
    l2 = 0.0
    sq = 0.0
    for I, fi in jump.items():
        l2 = max(l2, float(np.sqrt(np.mean(fi ** 2))))
        if len(fi) > 1:
            sq = max(sq, float(haar_square_function(fi, include_mean=False).max()))
    out = {"root_average": top}
    if norm == "psi2":
        out["f_I_l2"] = l2 / (math.sqrt(J) * top)
        out["S_I_f_I"] = sq / (math.sqrt(J) * top)
    else:
        scale = J ** (1.0 / q - 0.5) / math.sqrt(q - 1.0)
        out["f_I_l2_q"] = l2 / (scale * top)
        out["S_I_f_I_q"] = sq / (math.sqrt(J) * top)
    return out


def key_decomposition(f, root: DyadicInterval, m: AtomRq1, S, mode="psi2",
                      C: float | None = None) -> KeyDecomposition:
    """Split ``f 1_I = f_I + f'_I`` on every stopping interval along the jump tiles of ``m``.

    ``mode`` is ``"psi2"`` (L(log L)^{1/2} control) or an exponent ``q`` in
    ``(1, 2]`` (L^q control).  When ``C`` is given the stopping condition is
    enforced first.
    """
    f = np.asarray(f, dtype=float)
    N = resolution(f)
    if not isinstance(m, AtomRq1):
        raise TypeError("key decomposition needs an R_{q,1} atom")
    if not m.is_adapted(root):
        raise ValueError(f"multiplier is not adapted to {root}")
    S = S if isinstance(S, StoppingCollection) else StoppingCollection(root, tuple(S))
    if C is not None:
        chk = check_stopping_condition(f, root, S, mode, C)
        if not chk.passed:
            raise ValueError(f"stopping condition fails: {chk.total:.3g} > {C}")
    n0 = 1 << (N - root.level)
    f_loc = f[root.cells(N)]
    f_inf_loc, jump, rest = _split_local(f_loc, root, list(S), m.intervals, N)

    full = np.zeros(1 << N)

    def put(I, x):
        out = full.copy()
        out[I.cells(N)] = x
        return out

    f_inf = put(root, f_inf_loc)
    parts = {I: (put(I, jump[I]), put(I, rest[I])) for I in S}

    top = _avg(f_loc, mode)
    report = _decomposition_constants(f_loc, root, N, jump, m, m.J, mode,
                              None if mode == "psi2" else float(mode))
    report["f_inf_sup"] = float(np.abs(f_inf_loc).max()) / top if top > 0 else 0.0

    recon = f_inf_loc.copy()
    for I in S:
        recon[_rel_slice(I, root, N)] += jump[I] + rest[I]
    report["reconstruction_error"] = float(np.abs(recon - f_loc).max()) if n0 else 0.0

    sym_root = _symbol_on(m, root, N)
    th = 0.0
    orth = 0.0
    for I in S:
        mI = induce(m, I)
        g = np.zeros(n0)
        g[_rel_slice(I, root, N)] = rest[I]
        direct = _apply_local(sym_root, g)[_rel_slice(I, root, N)]
        induced = _apply_local(_symbol_on(mI, I, N), rest[I])
        th = max(th, float(np.abs(direct - induced).max()))
        orth = max(orth, abs(float(np.dot(jump[I], rest[I]))) / (1 << N))
    report["induced_error"] = th
    report["orthogonality_error"] = orth
    return KeyDecomposition(root, f_inf, parts, report)


# --- certificates ----------------------------------------------------------------

@dataclass
class CertEntry:
    interval: DyadicInterval
    f_avg: float
    g_avg: float
    margin: float = 1.0


@dataclass
class NodeReport:
    interval: DyadicInterval
    depth: int
    children: int
    child_measure: float
    pairing: float
    node_term: float
    checks: dict = field(default_factory=dict)


@dataclass
class SparseCertificate:
    kind: str
    params: dict
    collection: list[CertEntry]
    pairing: float
    form: float
    ratio: float
    nodes: list[NodeReport]
    violations: list[dict]
    maxima: dict

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def intervals(self) -> list[DyadicInterval]:
        return [e.interval for e in self.collection]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "collection": [[e.interval.to_json(), e.f_avg, e.g_avg, e.margin]
                           for e in self.collection],
            "pairing": self.pairing,
            "form": self.form,
            "ratio": self.ratio,
            "maxima": self.maxima,
            "violations": self.violations,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["level", "index", "f_avg", "g_avg", "margin"])
        for e in self.collection:
            w.writerow([e.interval.level, e.interval.index, repr(e.f_avg), repr(e.g_avg), repr(e.margin)])
        return buf.getvalue()


@dataclass
class SparsenessReport:
    passed: bool
    c: float
    margins: dict[DyadicInterval, float]

    @property
    def min_margin(self) -> float:
        return min(self.margins.values()) if self.margins else 1.0


def check_sparseness(S, N: int, c: float = 0.5) -> SparsenessReport:
    """Per interval the margin ``1 - |E_I|/|I|`` with ``E_I`` the union of the
    members strictly inside ``I``; passes when every margin is at least ``c``."""
    S = sorted(set(S), key=lambda I: (I.level, I.index))
    flags: dict[int, np.ndarray] = {}
    for I in S:
        flags.setdefault(I.level, np.zeros(1 << I.level, dtype=bool))[I.index] = True
    margins = {}
    for I in S:
        n = 1 << (N - I.level)
        cov = np.zeros(n, dtype=bool)
        for level, fl in flags.items():
            if level <= I.level:
                continue
            d = level - I.level
            sub = fl[I.index << d:(I.index + 1) << d]
            if sub.any():
                cov |= np.repeat(sub, 1 << (N - level))
        margins[I] = 1.0 - cov.mean()
    return SparsenessReport(all(v >= c - 1e-15 for v in margins.values()), c, margins)


def sparse_form(S, f, g, r: float = 1.0, f_norm="psi2", g_norm=1.0) -> float:
    """``sum_{I in S} |I| <f>_I^r <g>_I``."""
    N = resolution(f)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    total = 0.0
    for I in S:
        s = I.cells(N)
        total += I.length * _avg(f[s], f_norm) ** r * _avg(g[s], g_norm)
    return total


def _flag(violations, node, name, value, limit):
    if not value <= limit:
        violations.append({"node": node.to_json(), "check": name, "value": value, "limit": limit})


def _update_max(maxima, checks):
    for k, v in checks.items():
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            maxima[k] = max(maxima.get(k, -math.inf), v)


def _finish(kind, params, entries, nodes, violations, maxima, pairing, form, ratio, N):
    sp = check_sparseness([e.interval for e in entries], N, 0.5)
    for e in entries:
        e.margin = sp.margins[e.interval]
        if e.margin < 0.5 - 1e-15:
            violations.append({"node": e.interval.to_json(), "check": "sparseness",
                               "value": e.margin, "limit": 0.5})
    maxima["min_margin"] = sp.min_margin
    return SparseCertificate(kind, params, entries, pairing, form, ratio, nodes, violations, maxima)


def sparse_certify_multiplier(f, phi, m: AtomRq1, q: float,
                              threshold: float = STOPPING_THRESHOLD,
                              calibration: dict | None = None) -> SparseCertificate:
    """Recursive (psi2, q) sparse certificate for ``<T_m f, phi>``.

    At a node ``(I0, m)`` the stopping children are the maximal ``I ⊊ I0``
    where ``<f>_{I,psi2}`` or ``<phi>_{I,q}`` exceeds ``threshold`` times its
    value on ``I0``.  Both functions are decomposed along the jump tiles of
    ``m`` (f in psi2 mode, phi in L^q mode), the node keeps
    ``<T_m f~, phi~>`` and the recursion continues on ``(I, m_I, f 1_I, phi 1_I)``.
    Each node checks the induced-multiplier identity, the vanishing cross
    terms, the diagonal identity and the exact pairing split.
    """
    if not isinstance(m, AtomRq1):
        raise TypeError("atomize the multiplier first: certification needs an R_{q,1} atom")
    if not 1.0 < q <= 2.0:
        raise ValueError("q must lie in (1, 2]")
    f = np.asarray(f, dtype=float)
    phi = np.asarray(phi, dtype=float)
    N = resolution(f)
    if resolution(phi) != N:
        raise ValueError("f and phi have different resolutions")
    if m.max_frequency > (1 << N):
        raise ValueError("multiplier exceeds the resolution")
    scale = 1.0 / (1 << N)
    norm_f = float(np.sqrt(np.mean(f ** 2)))
    norm_phi = float(np.sqrt(np.mean(phi ** 2)))
    tol_lin = EXACT_TOL * max(norm_f, 1e-300)
    tol_bil = EXACT_TOL * max(norm_f * norm_phi, 1e-300)
    cal = calibration or {}

    entries, nodes, violations, maxima = [], [], [], {}
    stack = [(UNIT, m, f, phi, 0)]
    root_pairing = None
    while stack:
        I0, mm, f_loc, g_loc, depth = stack.pop()
        n0 = len(f_loc)
        avf = _local_averages(f_loc, I0, N, "psi2")
        avg = _local_averages(g_loc, I0, N, q)
        lam0, a0 = avf[I0.level][0], avg[I0.level][0]
        entries.append(CertEntry(I0, float(lam0), float(a0)))
        exceed = {}
        for lv in avf:
            ef = avf[lv] > threshold * lam0 if lam0 > 0 else np.zeros(len(avf[lv]), bool)
            eg = avg[lv] > threshold * a0 if a0 > 0 else np.zeros(len(avg[lv]), bool)
            exceed[lv] = ef | eg
        children = _maximal(exceed, I0, N)

        omegas = mm.intervals
        f_inf, fj, fr = _split_local(f_loc, I0, children, omegas, N)
        g_inf, gj, gr = _split_local(g_loc, I0, children, omegas, N)
        f_t = f_inf.copy()
        g_t = g_inf.copy()
        for I in children:
            s = _rel_slice(I, I0, N)
            f_t[s] += fj[I]
            g_t[s] += gj[I]

        sym = _symbol_on(mm, I0, N)
        Tf = _apply_local(sym, f_loc)
        pairing = float(np.dot(Tf, g_loc)) * scale
        if root_pairing is None:
            root_pairing = pairing
        Tft = _apply_local(sym, f_t)
        node_term = float(np.dot(Tft, g_t)) * scale

        checks = {"th_error": 0.0, "cross_error": 0.0, "diag_error": 0.0}
        recon = f_inf.copy()
        for I in children:
            recon[_rel_slice(I, I0, N)] += fj[I] + fr[I]
        checks["reconstruction_error"] = float(np.abs(recon - f_loc).max())

        child_pairings = 0.0
        child_data = []
        if children:
            keys, Frest = _embed(fr, I0, N, n0)
            _, Grest = _embed(gr, I0, N, n0)
            TFrest = _apply_local(sym, Frest)
            Tg_rest_pair = Grest @ Tft * scale
            cross1 = TFrest @ g_t * scale
            for i, I in enumerate(keys):
                s = _rel_slice(I, I0, N)
                mI = induce(mm, I)
                symI = _symbol_on(mI, I, N)
                via_induced = _apply_local(symI, fr[I])
                checks["th_error"] = max(checks["th_error"],
                                         float(np.abs(TFrest[i, s] - via_induced).max()),
                                         float(np.abs(np.delete(TFrest[i], np.r_[s])).max(initial=0.0)))
                checks["cross_error"] = max(checks["cross_error"], abs(float(cross1[i])),
                                            abs(float(Tg_rest_pair[i])))
                cp = float(np.dot(_apply_local(symI, f_loc[s]), g_loc[s])) * scale
                diag = float(np.dot(TFrest[i, s], gr[I])) * scale
                checks["diag_error"] = max(checks["diag_error"], abs(diag - cp))
                child_pairings += cp
                child_data.append((I, mI, f_loc[s], g_loc[s]))
        checks["split_error"] = abs(pairing - node_term - child_pairings)
        child_measure = sum(I.length for I in children) / I0.length
        checks["child_measure"] = child_measure

        J = mm.J
        consts_f = _decomposition_constants(f_loc, I0, N, fj, mm, J, "psi2")
        consts_g = _decomposition_constants(g_loc, I0, N, gj, mm, J, q, q)
        if lam0 > 0:
            checks["f_inf_sup"] = float(np.abs(f_inf).max()) / lam0
            checks["f_I_l2"] = consts_f.get("f_I_l2", 0.0)
            checks["S_I_f_I"] = consts_f.get("S_I_f_I", 0.0)
        if a0 > 0:
            checks["phi_inf_sup"] = float(np.abs(g_inf).max()) / a0
            checks["f_I_l2_q"] = consts_g.get("f_I_l2_q", 0.0)
        denom = I0.length * lam0 * a0 / math.sqrt(q - 1.0)
        checks["node_ratio"] = abs(node_term) / denom if denom > 0 else (0.0 if node_term == 0 else math.inf)

        node = NodeReport(I0, depth, len(children), child_measure, pairing, node_term, checks)
        nodes.append(node)
        _update_max(maxima, checks)
        _flag(violations, I0, "induced_multiplier", checks["th_error"], tol_lin)
        _flag(violations, I0, "cross_terms", checks["cross_error"], tol_bil)
        _flag(violations, I0, "diagonal", checks["diag_error"], tol_bil)
        _flag(violations, I0, "pairing_split", checks["split_error"], tol_bil)
        _flag(violations, I0, "reconstruction", checks["reconstruction_error"], tol_lin)
        _flag(violations, I0, "stopping_measure", child_measure, 0.5)
        for key in ("f_inf_sup", "f_I_l2", "S_I_f_I", "f_I_l2_q", "node_ratio"):
            if key in cal and key in checks:
                _flag(violations, I0, key, checks[key], cal[key])
        for I, mI, fs, gs in child_data:
            stack.append((I, mI, fs, gs, depth + 1))

    entries.sort(key=lambda e: (e.interval.level, e.interval.index))
    form = sum(e.interval.length * e.f_avg * e.g_avg for e in entries)
    bound = form / math.sqrt(q - 1.0)
    ratio = abs(root_pairing) / bound if bound > 0 else (0.0 if root_pairing == 0 else math.inf)
    if "multiplier_ratio" in cal:
        _flag(violations, UNIT, "ratio", ratio, cal["multiplier_ratio"])
    params = {"q": q, "J": m.J, "threshold": threshold, "N": N}
    return _finish("multiplier", params, entries, nodes, violations, maxima,
                   root_pairing, form, ratio, N)


def _collection_intervals(omega) -> list[FrequencyInterval]:
    if isinstance(omega, GoodCollection):
        if omega.base != UNIT:
            raise ValueError("certification starts at [0,1)")
        return list(omega.intervals)
    if isinstance(omega, MartingaleGrid):
        return omega.intervals
    ivs = sorted((w if isinstance(w, FrequencyInterval) else FrequencyInterval(*w) for w in omega),
                 key=lambda w: w.a)
    for u, w in zip(ivs, ivs[1:]):
        if u.b > w.a:
            raise ValueError(f"{u} and {w} overlap")
    return ivs


def _square_local(f_loc, I0, omegas, N):
    """``S_Omega`` of functions supported on ``I0`` (last axis local); Omega adapted to I0."""
    L = 1 << I0.level
    n0 = f_loc.shape[-1]
    if not omegas:
        return np.zeros(f_loc.shape)
    masks = np.zeros((len(omegas), n0))
    for i, w in enumerate(omegas):
        masks[i, w.a // L:min(w.b // L, n0)] = 1.0
    coef = local_forward(f_loc)[..., None, :]
    parts = local_inverse(coef * masks)
    return np.sqrt(np.sum(parts ** 2, axis=-2))


def _induced_collection(omegas, I):
    L = 1 << I.level
    return [x for x in (w.interior(L) for w in omegas) if x is not None]


def sparse_certify_square(f, g, omega, r: float = 1.0,
                          threshold: float = STOPPING_THRESHOLD,
                          calibration: dict | None = None) -> SparseCertificate:
    """Recursive (r, psi2, 1) sparse certificate for ``<(S_Omega f)^r, g>``.

    Stopping children are maximal ``I`` with ``<f>_{I,psi2}`` or ``<g>_I``
    above ``threshold`` times the parent value.  Checked per node: ``S_Omega f~``
    constant on every child, ``S_Omega f'_I = 1_I S_{Omega_I}(f 1_I)``, the
    pointwise split ``(S f)^r <= 2^{r-1}((S f~)^r + sum (S_{Omega_I} f'_I)^r)``
    (the exponent ``r <= 2`` makes the constant ``2^{r-1}``), and the pairing
    chain built on it.
    """
    if not 1.0 <= r <= 2.0:
        raise ValueError("r must lie in [1, 2]")
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    N = resolution(f)
    if resolution(g) != N:
        raise ValueError("f and g have different resolutions")
    omegas = _collection_intervals(omega)
    if any(w.b > (1 << N) for w in omegas):
        raise ValueError("collection exceeds the resolution")
    scale = 1.0 / (1 << N)
    norm_f = float(np.sqrt(np.mean(f ** 2)))
    tol_lin = EXACT_TOL * max(norm_f, 1e-300)
    cal = calibration or {}
    split_const = 2.0 ** (r - 1.0)

    entries, nodes, violations, maxima = [], [], [], {}
    stack = [(UNIT, omegas, f, np.abs(g), 0)]
    root_pairing = None
    while stack:
        I0, om, f_loc, g_loc, depth = stack.pop()
        n0 = len(f_loc)
        avf = _local_averages(f_loc, I0, N, "psi2")
        avg = _local_averages(g_loc, I0, N, 1.0)
        lam0, g0 = avf[I0.level][0], avg[I0.level][0]
        entries.append(CertEntry(I0, float(lam0), float(g0)))
        exceed = {}
        for lv in avf:
            ef = avf[lv] > threshold * lam0 if lam0 > 0 else np.zeros(len(avf[lv]), bool)
            eg = avg[lv] > threshold * g0 if g0 > 0 else np.zeros(len(avg[lv]), bool)
            exceed[lv] = ef | eg
        children = _maximal(exceed, I0, N)

        f_inf, fj, fr = _split_local(f_loc, I0, children, om, N)
        f_t = f_inf.copy()
        for I in children:
            f_t[_rel_slice(I, I0, N)] += fj[I]

        Sf = _square_local(f_loc, I0, om, N)
        Sft = _square_local(f_t, I0, om, N)
        pairing = float(np.dot(Sf ** r, g_loc)) * scale
        if root_pairing is None:
            root_pairing = pairing
        node_term = float(np.dot(Sft ** r, g_loc)) * scale

        checks = {"constancy": 0.0, "localization_error": 0.0}
        recon = f_inf.copy()
        for I in children:
            recon[_rel_slice(I, I0, N)] += fj[I] + fr[I]
        checks["reconstruction_error"] = float(np.abs(recon - f_loc).max())

        rhs = Sft ** r
        child_pairings = 0.0
        child_data = []
        if children:
            keys, Frest = _embed(fr, I0, N, n0)
            S_rest = _square_local(Frest, I0, om, N)
            for i, I in enumerate(keys):
                s = _rel_slice(I, I0, N)
                omI = _induced_collection(om, I)
                S_child = _square_local(f_loc[s], I, omI, N)
                checks["constancy"] = max(checks["constancy"], float(np.ptp(Sft[s])))
                checks["localization_error"] = max(
                    checks["localization_error"],
                    float(np.abs(S_rest[i, s] - S_child).max()),
                    float(np.abs(np.delete(S_rest[i], np.r_[s])).max(initial=0.0)))
                rhs[s] += S_child ** r
                child_pairings += float(np.dot(S_child ** r, g_loc[s])) * scale
                child_data.append((I, omI, f_loc[s], g_loc[s]))
        lhs = Sf ** r
        pos = rhs > 0
        checks["split_excess"] = float(np.max(lhs[pos] / rhs[pos], initial=0.0))
        if np.any(lhs[~pos] > 1e-12 * max(1.0, float(lhs.max()))):
            checks["split_excess"] = math.inf
        checks["chain_excess"] = (pairing / (node_term + child_pairings)
                                  if node_term + child_pairings > 0 else 0.0)
        child_measure = sum(I.length for I in children) / I0.length
        checks["child_measure"] = child_measure
        denom = I0.length * lam0 ** r * g0
        checks["node_ratio"] = node_term / denom if denom > 0 else (0.0 if node_term == 0 else math.inf)
        if lam0 > 0:
            checks["f_inf_sup"] = float(np.abs(f_inf).max()) / lam0
            consts = _decomposition_constants(f_loc, I0, N, fj, None, 1, "psi2")
            checks["f_I_l2"] = consts.get("f_I_l2", 0.0)

        node = NodeReport(I0, depth, len(children), child_measure, pairing, node_term, checks)
        nodes.append(node)
        _update_max(maxima, checks)
        _flag(violations, I0, "constancy", checks["constancy"], tol_lin)
        _flag(violations, I0, "localization", checks["localization_error"], tol_lin)
        _flag(violations, I0, "reconstruction", checks["reconstruction_error"], tol_lin)
        _flag(violations, I0, "pointwise_split", checks["split_excess"], split_const * (1 + 1e-9))
        _flag(violations, I0, "stopping_measure", child_measure, 0.5)
        for key in ("node_ratio", "f_inf_sup", "f_I_l2"):
            if "square_" + key in cal and key in checks:
                _flag(violations, I0, key, checks[key], cal["square_" + key])
        for item in child_data:
            stack.append((*item, depth + 1))

    entries.sort(key=lambda e: (e.interval.level, e.interval.index))
    form = sum(e.interval.length * e.f_avg ** r * e.g_avg for e in entries)
    ratio = root_pairing / form if form > 0 else (0.0 if root_pairing == 0 else math.inf)
    if "square_ratio" in cal:
        _flag(violations, UNIT, "ratio", ratio, cal["square_ratio"])
    params = {"r": r, "threshold": threshold, "N": N,
              "collection": [[w.a, w.b] for w in omegas]}
    return _finish("square", params, entries, nodes, violations, maxima,
                   root_pairing, form, ratio, N)


def composition_collection(m, N: int) -> GoodCollection:
    """Read ``m = sum_k sigma_k 1_[2^k, nu_k)`` (sigma in {-1, 0, 1}) as the
    good collection of its nonzero blocks."""
    v = m.values(N) if hasattr(m, "values") else np.asarray(m, dtype=float)
    if v[0] != 0:
        raise ValueError("m must vanish at frequency 0")
    ivs = []
    for k in range(N):
        blk = v[1 << k:1 << (k + 1)]
        sigma = blk[0]
        if sigma not in (-1.0, 0.0, 1.0):
            raise ValueError(f"block {k}: value {sigma} is not in {{-1, 0, 1}}")
        nz = np.nonzero(blk != sigma)[0]
        nu = len(blk) if len(nz) == 0 else int(nz[0])
        if np.any(blk[nu:] != 0):
            raise ValueError(f"block {k} is not of the form sigma 1_[2^k, nu)")
        if sigma != 0:
            ivs.append(FrequencyInterval(1 << k, (1 << k) + nu))
    return GoodCollection(tuple(ivs))


def sparse_certify_composition(f, g, m, r: float = 1.0, **kw) -> SparseCertificate:
    """Certificate for ``<(S_2 T_m f)^r, g>``: ``S_2 T_m f`` is the square
    function of the good collection formed by the nonzero blocks of ``m``."""
    from .multipliers import apply

    N = resolution(f)
    omega = composition_collection(m, N)
    cert = sparse_certify_square(f, g, omega, r, **kw)
    direct = s_lambda(apply(m, f), 2)
    via = _square_local(np.asarray(f, dtype=float), UNIT, list(omega.intervals), N)
    err = float(np.abs(direct - via).max())
    cert.maxima["composition_error"] = err
    cert.kind = "composition"
    if err > EXACT_TOL * max(float(np.sqrt(np.mean(np.asarray(f) ** 2))), 1e-300):
        cert.violations.append({"node": UNIT.to_json(), "check": "composition",
                                "value": err, "limit": EXACT_TOL})
    return cert


@dataclass
class LambdaCertificate:
    lam: int
    r: float
    kappa: int
    pairing: float
    bound: float
    ratio: float
    parts: dict[str, SparseCertificate]
    violations: list[dict]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"kind": "s_lambda", "lambda": self.lam, "r": self.r, "kappa": self.kappa,
                "pairing": self.pairing, "form": self.bound, "ratio": self.ratio,
                "violations": self.violations,
                "parts": {k: c.to_json() for k, c in self.parts.items()}}


def sparse_certify_lambda(f, g, lam: int, r: float = 1.0, **kw) -> LambdaCertificate:
    """Certificate for ``<(S_lambda f)^r, g>`` through the martingale/good split.

    ``S_lambda^2 <= kappa (S_mu^2 + S_right^2 + S_left^2)`` and ``r/2 <= 1``
    give ``<(S_lambda f)^r, g> <= kappa^{r/2} sum of the three pairings``;
    the reported form is ``kappa^{r/2}`` times the sum of the three forms.
    """
    N = resolution(f)
    red = reduce_s_lambda(lam, N)
    parts = {
        "martingale": sparse_certify_square(f, g, red.martingale, r, **kw),
        "right": sparse_certify_square(f, g, red.right, r, **kw),
        "left": sparse_certify_square(f, g, red.left, r, **kw),
    }
    pairing = float(np.mean(s_lambda(f, lam) ** r * np.abs(g)))
    k = red.kappa ** (r / 2)
    chain = k * sum(c.pairing for c in parts.values())
    bound = k * sum(c.form for c in parts.values())
    violations = [dict(v, part=name) for name, c in parts.items() for v in c.violations]
    if pairing > chain * (1 + 1e-9):
        violations.append({"node": UNIT.to_json(), "check": "lambda_domination",
                           "value": pairing, "limit": chain})
    ratio = pairing / bound if bound > 0 else 0.0
    return LambdaCertificate(lam, r, red.kappa, pairing, bound, ratio, parts, violations)
