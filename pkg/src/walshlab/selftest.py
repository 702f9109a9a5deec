"""Invariant suites shared by ``walshlab selftest`` and the demos."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .dyadic import FrequencyInterval
from .experiments import (cww_scan, key_decomposition_trials, lower_bound_lerner,
                          multiplier_certificate_trials, rademacher_sum, square_certificate_trials,
                          zygmund_scan)
from .multipliers import atomize_marcinkiewicz, recombine
from .tiles import (apply_tiles, local_basis, projection_tile_expansion, signed_haar_factor,
                    tiles_intersect, wave_packet)
from .walsh import haar_function, project, walsh_forward, walsh_function, walsh_inverse


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def direct_walsh_coefficients(f) -> np.ndarray:
    """O(4^N) oracle: ``<f, w_n>`` from sampled Rademacher products."""
    f = np.asarray(f, dtype=float)
    N = int(np.log2(len(f)))
    x = (np.arange(1 << N) + 0.5) / (1 << N)
    rad = np.sign(np.sin(np.pi * (2.0 ** (np.arange(N)[:, None] + 1)) * x[None, :]))
    out = np.empty(1 << N)
    for n in range(1 << N):
        w = np.ones(1 << N)
        for k in range(N):
            if n >> k & 1:
                w = w * rad[k]
        out[n] = np.dot(f, w) / (1 << N)
    return out


def suite_transforms(N: int, rng) -> str:
    f = rng.standard_normal(1 << N)
    c = walsh_forward(f)
    assert abs(np.sum(c ** 2) - np.mean(f ** 2)) <= 1e-12 * np.mean(f ** 2)
    assert np.abs(walsh_inverse(c) - f).max() <= 1e-12 * np.abs(f).max()
    small = min(N, 6)
    g = rng.standard_normal(1 << small)
    err = np.abs(walsh_forward(g) - direct_walsh_coefficients(g)).max()
    assert err <= 1e-12, err
    return f"parseval ok, oracle error {err:.1e} at N={small}"


def suite_tiles(N: int) -> str:
    worst = 0.0
    for n in range(1, 1 << N):
        f = walsh_function(n, N) + walsh_function((n * 7 + 3) % (1 << N), N)
        tiles = projection_tile_expansion(n, N)
        worst = max(worst, float(np.abs(apply_tiles(f, tiles, N) - project(f, FrequencyInterval(0, n))).max()))
        wn = walsh_function(n, N)
        for p in tiles:
            h = haar_function(p.interval, N) * signed_haar_factor(n, p, N) if p.level < N else None
            if h is not None:
                worst = max(worst, float(np.abs(wn * wave_packet(p, N) - h).max()))
    assert worst <= 1e-10, worst
    basis = local_basis(projection_tile_expansion(1, N)[0].interval, N)[:4]
    for p in basis:
        for q in basis:
            inner = np.dot(wave_packet(p, N), wave_packet(q, N)) / (1 << N)
            assert (abs(inner) < 1e-12) == (not tiles_intersect(p, q))
    return f"expansion and signed Haar error {worst:.1e} at N={N}"


def suite_atomization(N: int, rng) -> str:
    v = rng.standard_normal(1 << N)
    err = np.abs(recombine(atomize_marcinkiewicz(v, N), N) - v).max()
    assert err <= 1e-10, err
    return f"reconstruction error {err:.1e}"


def suite_key_decomposition(count: int, N: int) -> str:
    rows = key_decomposition_trials(count, N, seed=0)
    rec = max(r["reconstruction_error"] / r["norm_f"] for r in rows)
    ind = max(r["induced_error"] / r["norm_f"] for r in rows)
    assert rec <= 1e-10 and ind <= 1e-10, (rec, ind)
    return f"{len(rows)} decompositions, reconstruction {rec:.1e}, induced {ind:.1e}"


def suite_certificates(count: int, N: int) -> str:
    from .calibration import multiplier_limits, square_limits

    bad = 0
    for cert in multiplier_certificate_trials(count, N, 0, multiplier_limits()):
        bad += not cert.ok
    for cert in square_certificate_trials(count, N, 0, square_limits()):
        bad += not cert.ok
    assert bad == 0, f"{bad} certificates with violations"
    return f"{2 * count} certificates clean"


def suite_lower_bound() -> str:
    for n in (4, 6, 8, 10, 16):
        r = lower_bound_lerner(n)
        assert abs(r.pairing - r.pairing_exact) <= 1e-12
        assert r.g_norm_identity_error <= 1e-10
    return "pairing -n 2^-n reproduced for n = 4..16"


def suite_scans(N: int, rng) -> str:
    for n in range(1, min(N - 1, 12) + 1):
        f = np.zeros(1 << N)
        f[: 1 << (N - n)] = 2.0 ** n
        rep = zygmund_scan([1 << k for k in range(N)], {"f": f})
        assert abs(rep.rows[0]["l2"] - np.sqrt(n)) <= 1e-12
        g = rademacher_sum(rng.choice([-1.0, 1.0], size=n), N)
        rep = cww_scan({"g": g})
        assert abs(rep.rows[0]["square_sup"] - np.sqrt(n)) <= 1e-12
    return "sqrt(n) closed forms reproduced"


def run(level: str = "quick", N: int = 10) -> list[SuiteResult]:
    if level not in ("quick", "exhaustive"):
        raise ValueError("level is 'quick' or 'exhaustive'")
    full = level == "exhaustive"
    rng = np.random.default_rng(0)
    suites = [
        ("transforms", lambda: suite_transforms(N, rng)),
        ("tiles", lambda: suite_tiles(8 if full else 6)),
        ("atomization", lambda: suite_atomization(N, rng)),
        ("key_decomposition", lambda: suite_key_decomposition(200 if full else 20, N)),
        ("certificates", lambda: suite_certificates(200 if full else 10, N)),
        ("lower_bound", suite_lower_bound),
        ("scans", lambda: suite_scans(max(N, 13) if full else N, rng)),
    ]
    out = []
    for name, fn in suites:
        t = time.perf_counter()
        try:
            detail, ok = fn(), True
        except AssertionError as exc:
            detail, ok = f"failed: {exc}", False
        out.append(SuiteResult(name, ok, detail, time.perf_counter() - t))
    return out
