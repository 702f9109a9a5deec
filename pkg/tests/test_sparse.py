import csv
import io
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from walshlab.dyadic import UNIT, DyadicInterval, all_intervals
from walshlab.experiments import random_block_sign_symbol, random_good_collection, random_signal
from walshlab.multipliers import AtomRq1, MultiplierSymbol, apply, random_atom
from walshlab.orlicz import INVERSE_AT_ONE, luxemburg, luxemburg_rows
from walshlab.sparse import (StoppingCollection, check_sparseness, check_stopping_condition,
                             composition_collection, key_decomposition, maximal_intervals,
                             sparse_certify_composition, sparse_certify_lambda,
                             sparse_certify_multiplier, sparse_certify_square, sparse_form)
from walshlab.squares import GoodCollection, s_lambda
from walshlab.walsh import haar_square_function, walsh_function

# outside the union |f| <= 4 psi^{-1}(1) <f>; a maximal interval has a parent
# below threshold, so its own average is at most twice that
STOPPING_BOUND = 4 * INVERSE_AT_ONE["psi2"] + 8


def test_stopping_collection_validation():
    StoppingCollection(UNIT, (DyadicInterval(2, 0), DyadicInterval(1, 1)))
    with pytest.raises(ValueError):
        StoppingCollection(UNIT, (UNIT,))
    with pytest.raises(ValueError):
        StoppingCollection(UNIT, (DyadicInterval(1, 0), DyadicInterval(2, 1)))
    with pytest.raises(ValueError):
        StoppingCollection(DyadicInterval(1, 0), (DyadicInterval(2, 2),))


@pytest.mark.parametrize("norm", ["psi2", 1.5])
def test_maximal_intervals(rng, norm):
    N = 9
    for _ in range(10):
        f = random_signal(rng, N)
        S = maximal_intervals(f, UNIT, norm)
        top = luxemburg(f) if norm == "psi2" else np.mean(np.abs(f) ** norm) ** (1 / norm)

        def avg(I):
            x = f[I.cells(N)]
            return luxemburg_rows(x[None, :])[0] if norm == "psi2" else np.mean(np.abs(x) ** norm) ** (1 / norm)

        for I in S:
            assert avg(I) > 4 * top
            J = I.parent
            while J.level > 0:
                assert avg(J) <= 4 * top
                J = J.parent
        assert S.measure() <= 0.5


def test_stopping_condition_examples(rng):
    N = 8
    f = rng.random(1 << N) + 1.0
    chk = check_stopping_condition(f, UNIT, [], "psi2", C=2 * INVERSE_AT_ONE["psi2"] * 2)
    assert chk.passed
    for _ in range(20):
        f = random_signal(rng, N)
        S = maximal_intervals(f, UNIT)
        assert check_stopping_condition(f, UNIT, S, "psi2", STOPPING_BOUND).passed
    f = np.ones(1 << N)
    f[3] = 1e4
    assert not check_stopping_condition(f, UNIT, [DyadicInterval(2, 3)], "psi2", C=8).passed


def test_key_decomposition_empty_family(rng):
    N = 8
    f = rng.standard_normal(1 << N)
    kd = key_decomposition(f, UNIT, random_atom(rng, N, 2, 1.5), [])
    assert np.array_equal(kd.f_inf, f)
    assert kd.parts == {}


def test_key_decomposition_adapted_atom(rng):
    N = 8
    f = random_signal(rng, N)
    S = [DyadicInterval(3, 1), DyadicInterval(4, 9)]
    m = AtomRq1(1.5, 1, {5: [(16, 32)], 7: [(64, 80)]})
    kd = key_decomposition(f, UNIT, m, S)
    for fi, _ in kd.parts.values():
        assert np.all(fi == 0)


@pytest.mark.parametrize("mode", ["psi2", 1.25, 1.5, 2.0])
def test_key_decomposition_properties(rng, mode):
    N = 10
    for _ in range(8):
        f = random_signal(rng, N)
        m = random_atom(rng, N, int(rng.choice([1, 2, 4])), 1.5)
        S = maximal_intervals(f, UNIT, mode)
        kd = key_decomposition(f, UNIT, m, S, mode, C=STOPPING_BOUND)
        norm = np.sqrt(np.mean(f ** 2))
        assert np.abs(kd.reconstruct() - f).max() <= 1e-10 * norm
        off = np.ones(1 << N, dtype=bool)
        for I, (fi, fp) in kd.parts.items():
            out = np.ones(1 << N, dtype=bool)
            out[I.cells(N)] = False
            off[I.cells(N)] = False
            assert not fi[out].any() and not fp[out].any()
            assert abs(np.dot(fi, fp)) <= 1e-10 * np.dot(f, f)
        assert np.array_equal(kd.f_inf[off], f[off])
        assert not kd.f_inf[~off].any()
        assert kd.report["induced_error"] <= 1e-10 * norm
        assert kd.report["f_inf_sup"] <= 4 + 1e-9


def test_key_decomposition_square_function_bound(rng):
    N = 8
    f = random_signal(rng, N)
    m = random_atom(rng, N, 4, 1.5)
    S = maximal_intervals(f)
    kd = key_decomposition(f, UNIT, m, S)
    worst = 0.0
    for I, (fi, _) in kd.parts.items():
        x = fi[I.cells(N)]
        if len(x) > 1:
            worst = max(worst, haar_square_function(x, include_mean=False).max())
    assert_allclose(worst / (math.sqrt(m.J) * luxemburg(f)), kd.report.get("S_I_f_I", 0.0), rtol=1e-12)


def test_key_decomposition_errors(rng):
    N = 6
    f = rng.standard_normal(1 << N)
    m = AtomRq1(1.5, 1, {3: [(5, 8)]})
    with pytest.raises(ValueError):
        key_decomposition(f, DyadicInterval(1, 0), m, [])
    with pytest.raises(TypeError):
        key_decomposition(f, UNIT, m.symbol(), [])
    g = np.ones(1 << N)
    g[0] = 1e6
    with pytest.raises(ValueError):
        key_decomposition(g, UNIT, m, [DyadicInterval(1, 1)], C=8)


def test_certify_constants():
    N = 8
    f = np.full(1 << N, 2.0)
    phi = np.full(1 << N, -1.0)
    m = AtomRq1(2.0, 1, {k: [((1 << (k - 1)), (1 << k))] for k in range(1, N + 1)} | {0: [(0, 1)]})
    cert = sparse_certify_multiplier(f, phi, m, 1.5)
    assert cert.intervals == [UNIT]
    assert cert.ratio <= 1.0
    assert_allclose(cert.pairing, -2.0)


def test_certify_full_spectrum_atom_self_pairing(rng):
    N = 8
    f = random_signal(rng, N)
    m = AtomRq1(2.0, 1, {k: [((1 << (k - 1)), (1 << k))] for k in range(1, N + 1)} | {0: [(0, 1)]})
    cert = sparse_certify_multiplier(f, f, m, 2.0)
    assert_allclose(cert.pairing, np.mean(f ** 2))
    assert cert.pairing <= cert.form
    assert cert.ok


def test_certify_multiplier_errors(rng):
    f = rng.standard_normal(16)
    with pytest.raises(TypeError):
        sparse_certify_multiplier(f, f, MultiplierSymbol.constant(1.0, 4), 1.5)
    m = AtomRq1(1.5, 1, {2: [(2, 4)]})
    for q in (1.0, 2.5):
        with pytest.raises(ValueError):
            sparse_certify_multiplier(f, f, m, q)
    with pytest.raises(ValueError):
        sparse_certify_multiplier(f, rng.standard_normal(32), m, 1.5)


def test_certify_multiplier_structure(rng):
    N = 10
    for _ in range(10):
        q = float(rng.choice([1.1, 1.5, 2.0]))
        m = random_atom(rng, N, int(rng.choice([1, 2, 4])), q)
        f, phi = random_signal(rng, N), random_signal(rng, N)
        cert = sparse_certify_multiplier(f, phi, m, q)
        assert cert.ok, cert.violations
        assert_allclose(cert.pairing, np.mean(apply(m, f) * phi), atol=1e-9 * np.sqrt(np.mean(f ** 2) * np.mean(phi ** 2)))
        assert max(n.depth for n in cert.nodes) <= N
        assert check_sparseness(cert.intervals, N).passed
        assert all(n.child_measure <= 0.5 for n in cert.nodes)
        assert_allclose(cert.form, sparse_form(cert.intervals, f, phi, 1.0, "psi2", q), rtol=1e-9)


def test_threshold_knob(rng):
    N = 10
    f, phi = random_signal(rng, N), random_signal(rng, N)
    m = random_atom(rng, N, 2, 1.5)
    a = sparse_certify_multiplier(f, phi, m, 1.5, threshold=4.0)
    b = sparse_certify_multiplier(f, phi, m, 1.5, threshold=64.0)
    assert len(b.collection) <= len(a.collection)
    assert_allclose(a.pairing, b.pairing)


def test_calibration_limits_flag_violations(rng):
    N = 8
    f, phi = random_signal(rng, N), random_signal(rng, N)
    m = random_atom(rng, N, 2, 1.5)
    cert = sparse_certify_multiplier(f, phi, m, 1.5, calibration={"multiplier_ratio": 0.0})
    if cert.ratio > 0:
        assert not cert.ok
        assert cert.violations[-1]["check"] == "ratio"


def test_square_empty_collection(rng):
    f, g = rng.standard_normal((2, 64))
    cert = sparse_certify_square(f, g, GoodCollection(()), 1.5)
    assert cert.pairing == 0.0 and cert.ok


def test_square_single_character():
    N = 8
    f = walsh_function(37, N)
    g = np.ones(1 << N)
    cert = sparse_certify_square(f, g, GoodCollection(((32, 40),)), 2.0)
    assert cert.intervals == [UNIT]
    assert_allclose(cert.pairing, 1.0)


@pytest.mark.parametrize("r", [1.0, 1.5, 2.0])
def test_square_random(rng, r):
    N = 10
    for _ in range(6):
        f, g = random_signal(rng, N), random_signal(rng, N)
        omega = random_good_collection(rng, N)
        cert = sparse_certify_square(f, g, omega, r)
        assert cert.ok, cert.violations
        norm = np.sqrt(np.mean(f ** 2))
        assert cert.maxima["constancy"] <= 1e-10 * norm
        assert cert.maxima["split_excess"] <= 2 ** (r - 1) * (1 + 1e-9)
        from walshlab.squares import s_good
        assert_allclose(cert.pairing, np.mean(s_good(f, omega) ** r * np.abs(g)), rtol=1e-9)
        assert_allclose(cert.form, sparse_form(cert.intervals, f, g, r, "psi2", 1.0), rtol=1e-9)


def test_square_rejects_bad_inputs(rng):
    f = rng.standard_normal(64)
    with pytest.raises(ValueError):
        sparse_certify_square(f, f, [(4, 9), (8, 12)], 1.0)
    with pytest.raises(ValueError):
        sparse_certify_square(f, f, GoodCollection(((4, 8),)), 2.5)
    with pytest.raises(ValueError):
        sparse_certify_square(f, f, GoodCollection(((4, 8),), DyadicInterval(1, 0)), 1.0)


def test_composition(rng):
    N = 9
    f, g = random_signal(rng, N), random_signal(rng, N)
    zero = sparse_certify_composition(f, g, MultiplierSymbol(()), 1.0)
    assert zero.pairing == 0.0
    single = MultiplierSymbol((((16, 27), -1.0),))
    cert = sparse_certify_composition(f, g, single, 1.5)
    assert cert.ok
    assert_allclose(cert.pairing, np.mean(s_lambda(apply(single, f), 2) ** 1.5 * np.abs(g)), rtol=1e-9)
    for _ in range(5):
        m = random_block_sign_symbol(rng, N)
        cert = sparse_certify_composition(f, g, m, 2.0)
        assert cert.ok and cert.maxima["composition_error"] <= 1e-10 * np.sqrt(np.mean(f ** 2))


def test_composition_rejects_bad_symbols():
    N = 6
    with pytest.raises(ValueError):
        composition_collection(MultiplierSymbol((((4, 6), 0.5),)), N)
    with pytest.raises(ValueError):
        composition_collection(MultiplierSymbol((((5, 7), 1.0),)), N)
    with pytest.raises(ValueError):
        composition_collection(MultiplierSymbol((((0, 1), 1.0),)), N)
    omega = composition_collection(MultiplierSymbol((((4, 6), 1.0), ((8, 16), -1.0))), N)
    assert [(w.a, w.b) for w in omega.intervals] == [(4, 6), (8, 16)]


@pytest.mark.parametrize("lam", [3, 4, 5])
def test_lambda_certificate(rng, lam):
    N = 9
    f, g = random_signal(rng, N), random_signal(rng, N)
    cert = sparse_certify_lambda(f, g, lam, 1.5)
    assert cert.ok, cert.violations
    chain = cert.kappa ** 0.75 * sum(c.pairing for c in cert.parts.values())
    assert cert.pairing <= chain * (1 + 1e-9)
    assert cert.to_json()["kind"] == "s_lambda"


def test_sparse_form_single_interval(rng):
    f, g = rng.standard_normal((2, 32))
    val = sparse_form([UNIT], f, g, 1.0, 2.0, 1.5)
    assert_allclose(val, np.sqrt(np.mean(f ** 2)) * np.mean(np.abs(g) ** 1.5) ** (1 / 1.5))


def test_sparseness_full_tree_fails():
    N = 5
    rep = check_sparseness(list(all_intervals(N)), N)
    assert not rep.passed
    assert rep.margins[UNIT] == 0.0
    assert all(v == 1.0 for I, v in rep.margins.items() if I.level == N)


def test_sparseness_margin_values():
    S = [UNIT, DyadicInterval(2, 0), DyadicInterval(3, 7)]
    rep = check_sparseness(S, 4)
    assert rep.passed
    assert_allclose(rep.margins[UNIT], 1 - 0.25 - 0.125)
    assert not check_sparseness(S + [DyadicInterval(1, 0)], 4).passed


def test_certificate_serialization(rng):
    N = 8
    f, phi = random_signal(rng, N), random_signal(rng, N)
    cert = sparse_certify_multiplier(f, phi, random_atom(rng, N, 1, 2.0), 2.0)
    obj = cert.to_json()
    assert set(obj) >= {"collection", "pairing", "form", "ratio", "violations"}
    interval, f_avg, g_avg, margin = obj["collection"][0]
    assert interval == {"level": 0, "index": 0} and margin >= 0.5
    rows = list(csv.reader(io.StringIO(cert.to_csv())))
    assert rows[0] == ["level", "index", "f_avg", "g_avg", "margin"]
    assert len(rows) == len(cert.collection) + 1
