import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from walshlab.dyadic import (UNIT, DyadicInterval, FrequencyInterval, all_intervals, as_signal,
                             average, children, contains, integral, level_averages, resolution,
                             signal_from_json, signal_to_json)


def test_average_of_constant():
    f = np.full(64, -3.0)
    for I in (UNIT, DyadicInterval(3, 5), DyadicInterval(6, 63)):
        assert_allclose(average(f, I, 2), 3.0)


def test_average_of_half_indicator():
    f = np.zeros(16)
    f[:8] = 1.0
    assert_allclose(average(f, UNIT, 1), 0.5)


@pytest.mark.parametrize("n, q", [(3, 1.5), (5, 1.2), (8, 2.0)])
def test_average_of_normalized_indicator(n, q):
    N = n + 2
    f = np.zeros(1 << N)
    f[: 1 << (N - n)] = 2.0 ** n
    assert_allclose(average(f, UNIT, q), 2.0 ** (n - n / q), rtol=1e-12)


def test_average_rejects_small_exponent():
    with pytest.raises(ValueError):
        average(np.ones(4), UNIT, 0.5)


def test_sup_average():
    f = np.array([1.0, -7.0, 2.0, 0.0])
    assert average(f, UNIT, np.inf) == 7.0
    assert average(f, DyadicInterval(1, 1), np.inf) == 2.0


def test_children_and_containment():
    left, right = children(UNIT)
    assert (left, right) == (DyadicInterval(1, 0), DyadicInterval(1, 1))
    assert contains(DyadicInterval(1, 0), DyadicInterval(2, 1))
    assert not contains(DyadicInterval(1, 0), DyadicInterval(1, 1))
    assert DyadicInterval(2, 1).parent == DyadicInterval(1, 0)


def test_children_beyond_resolution():
    with pytest.raises(ValueError):
        DyadicInterval(4, 3).children(N=4)


def test_interval_validation():
    with pytest.raises(ValueError):
        DyadicInterval(2, 4)
    with pytest.raises(ValueError):
        DyadicInterval(-1, 0)


def test_cells():
    I = DyadicInterval(2, 3)
    s = I.cells(5)
    assert (s.start, s.stop) == (24, 32)
    assert_allclose(I.indicator(5).sum() / 32, I.length)


def test_nested_or_disjoint_exhaustive():
    ivs = list(all_intervals(6))
    assert len(ivs) == 2 ** 7 - 1
    for I, J in itertools.combinations(ivs, 2):
        overlap = max(I.left, J.left) < min(I.right, J.right)
        assert overlap == (I.contains(J) or J.contains(I))


def test_restricted_mass_monotone(rng):
    f = rng.standard_normal(256)
    for J in all_intervals(8):
        if J.level == 0:
            continue
        I = J.parent
        assert I.length * average(f, I, 1) >= J.length * average(f, J, 1) - 1e-15


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_average_nondecreasing_in_p(seed):
    f = np.random.default_rng(seed).standard_normal(64)
    for level in range(7):
        a = [level_averages(f, level, p) for p in (1.0, 1.5, 2.0)]
        assert np.all(a[0] <= a[1] * (1 + 1e-12))
        assert np.all(a[1] <= a[2] * (1 + 1e-12))


def test_frequency_interval():
    w = FrequencyInterval(8, 12)
    assert w.is_dyadic and w.length == 4 and 11 in w and 12 not in w
    assert not FrequencyInterval(6, 10).is_dyadic
    assert FrequencyInterval(3, 13).interior(4) == FrequencyInterval(4, 12)
    assert FrequencyInterval(3, 6).interior(4) is None
    with pytest.raises(ValueError):
        FrequencyInterval(5, 5)


def test_resolution_and_signal_json():
    f = as_signal(np.arange(8.0))
    assert resolution(f) == 3
    assert_allclose(integral(f), np.mean(np.arange(8.0)))
    assert np.array_equal(signal_from_json(signal_to_json(f)), f)
    with pytest.raises(ValueError):
        resolution(np.ones(6))
    with pytest.raises(ValueError):
        as_signal(np.ones(8), 4)


def test_interval_json_roundtrip():
    I = DyadicInterval(5, 17)
    assert DyadicInterval.from_json(I.to_json()) == I
    assert I.to_json() == {"level": 5, "index": 17}
