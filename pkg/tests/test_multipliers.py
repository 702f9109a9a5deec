import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from walshlab.dyadic import UNIT, DyadicInterval, FrequencyInterval
from walshlab.multipliers import (AtomRq1, MultiplierSymbol, apply, atomize_marcinkiewicz,
                                  block_bv, induce, marcinkiewicz_norm, multiplier_from_json,
                                  partition_block_counts, random_atom, recombine,
                                  relative_interior, tile_partition)
from walshlab.tiles import wave_packet
from walshlab.walsh import walsh_forward, walsh_function


def test_symbol_canonical_form():
    m = MultiplierSymbol((((4, 6), 1.0), ((0, 2), 2.0), ((2, 4), 2.0), ((6, 8), 0.0)))
    assert m.pieces == ((FrequencyInterval(0, 4), 2.0), (FrequencyInterval(4, 6), 1.0))
    with pytest.raises(ValueError):
        MultiplierSymbol((((0, 3), 1.0), ((2, 4), 1.0)))
    v = np.array([0, 1, 1, 3, 3, 3, 0, 0], dtype=float)
    assert_array_equal(MultiplierSymbol.from_values(v).values(3), v)


def test_apply_identity(rng):
    f = rng.standard_normal(64)
    assert_allclose(apply(MultiplierSymbol.constant(1.0, 6), f), f, atol=1e-13)


def test_apply_is_diagonal(rng):
    f = rng.standard_normal(128)
    v = rng.standard_normal(128)
    assert_allclose(walsh_forward(apply(v, f)), v * walsh_forward(f), atol=1e-13)


@pytest.mark.parametrize("n", [3, 6])
def test_rademacher_multiplier_on_bump(n):
    N = n + 2
    f = np.zeros(1 << N)
    f[: 1 << (N - n)] = 2.0 ** n
    m = MultiplierSymbol(tuple(((1 << k, (1 << k) + 1), 1.0) for k in range(n)))
    expect = sum(walsh_function(1 << k, N) for k in range(n))
    assert_allclose(apply(m, f), expect, atol=1e-12)


def test_atom_operator_norm(rng):
    N = 8
    for _ in range(20):
        J = int(rng.choice([1, 2, 4]))
        q = float(rng.choice([1.0, 1.5, 2.0]))
        m = random_atom(rng, N, J, q)
        f = rng.standard_normal(1 << N)
        assert np.linalg.norm(apply(m, f)) <= J ** (-1 / q) * np.linalg.norm(f) * (1 + 1e-12)


def test_atom_validation():
    AtomRq1(1.5, 2, {3: [(4, 5), (6, 8)]})
    with pytest.raises(ValueError):
        AtomRq1(1.5, 1, {3: [(4, 5), (6, 8)]})
    with pytest.raises(ValueError):
        AtomRq1(1.5, 2, {3: [(3, 5)]})
    with pytest.raises(ValueError):
        AtomRq1(1.5, 2, {3: [(4, 6), (5, 8)]})
    a = AtomRq1(2.0, 4, {2: [(2, 3)], 0: [(0, 1)]})
    assert_allclose(a.values(3), [0.5, 0, 0.5, 0, 0, 0, 0, 0])
    assert AtomRq1.from_json(a.to_json()) == a
    assert multiplier_from_json(a.to_json()) == a


def test_symbol_json():
    m = MultiplierSymbol((((1, 5), -2.0), ((9, 12), 0.5)))
    assert MultiplierSymbol.from_json(m.to_json()) == m
    assert multiplier_from_json(m.to_json()) == m
    with pytest.raises(ValueError):
        multiplier_from_json({"weights": []})


def test_marcinkiewicz_examples():
    N = 8
    assert marcinkiewicz_norm(np.ones(1 << N), N) == 1.0
    v = np.zeros(1 << N)
    v[[1 << k for k in range(N)]] = 1.0
    assert marcinkiewicz_norm(v, N) == 3.0
    a = AtomRq1(1.0, 1, {k: [(1 << (k - 1), (1 << (k - 1)) + 1)] for k in range(1, N + 1)})
    assert marcinkiewicz_norm(a, N) <= 3.0


def test_block_bv_nonnegative(rng):
    bv = block_bv(rng.standard_normal(64), 6)
    assert np.all(bv.variation >= 0) and np.all(bv.sup >= 0)


def test_atomize_block_constant():
    N = 5
    v = np.zeros(1 << N)
    for j in range(N):
        v[1 << j:2 << j] = 0.5 * j
    atoms = atomize_marcinkiewicz(v, N)
    assert_allclose(recombine(atoms, N), v)
    # block constants need one atom per distinct level and no within-block layers
    assert len(atoms) == len({0.5 * j for j in range(1, N)})


def test_atomize_increasing_profile():
    N = 4
    v = np.zeros(16)
    v[8:16] = [0, 0, 0.5, 0.5, 0.5, 1, 1, 1]
    atoms = atomize_marcinkiewicz(v, N)
    assert [t for t, _ in atoms] == [0.5, 0.5]
    assert_allclose(recombine(atoms, N), v)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_atomize_reconstructs(seed):
    r = np.random.default_rng(seed)
    N = 6
    v = np.round(r.standard_normal(1 << N), 1)
    atoms = atomize_marcinkiewicz(v, N)
    assert_allclose(recombine(atoms, N), v, atol=1e-12)
    assert all(a.J == 1 and a.q == 1.0 for _, a in atoms)
    assert sum(abs(t) for t, _ in atoms) <= 2 * marcinkiewicz_norm(v, N) * (1 + 1e-12)


def test_relative_interior():
    I4 = DyadicInterval(2, 0)
    assert relative_interior(FrequencyInterval(3, 13), I4) == FrequencyInterval(4, 12)
    assert relative_interior(FrequencyInterval(8, 16), DyadicInterval(3, 2)) == FrequencyInterval(8, 16)
    assert relative_interior(FrequencyInterval(5, 7), I4) is None


def test_induce_adapted_is_identity():
    m = AtomRq1(1.5, 2, {4: [(8, 12), (14, 16)]})
    assert induce(m, DyadicInterval(1, 0)) == m
    s = m.symbol()
    assert induce(s, DyadicInterval(1, 1)) == s


def test_induce_tower(rng):
    N = 8
    for _ in range(20):
        m = random_atom(rng, N, 4, 1.5)
        J = DyadicInterval(5, int(rng.integers(32)))
        I = J.parent.parent
        assert induce(induce(m, I), J) == induce(m, J)
        mJ = induce(m, J)
        assert mJ.is_adapted(J)
        assert all(len(v) <= m.J for v in mJ.blocks.values())


def test_single_cell_induce_coarsest():
    m = AtomRq1(1.0, 1, {5: [(16, 20)], 6: [(32, 64)]})
    mI = induce(m, DyadicInterval(5, 3))
    assert mI.intervals == [FrequencyInterval(32, 64)]


def test_partition_when_adapted():
    m = AtomRq1(1.0, 2, {4: [(8, 12)]})
    jumps, rest = tile_partition(m, DyadicInterval(2, 1), 6)
    assert jumps == [] and len(rest) == 16


def test_single_jump_tile():
    m = AtomRq1(1.0, 1, {4: [(9, 16)]})
    I = DyadicInterval(2, 0)
    jumps, _ = tile_partition(m, I, 6)
    assert [p.freq for p in jumps] == [2]


def test_partition_block_counts_exhaustive():
    N = 8
    r = np.random.default_rng(5)
    for _ in range(40):
        J = int(r.choice([1, 2, 3]))
        m = random_atom(r, N, J, 1.0)
        for level in range(0, N):
            I = DyadicInterval(level, 0)
            counts = partition_block_counts(m, I, N)
            # two endpoints per interval
            assert all(c <= 2 * J for c in counts.values())


def test_induced_multiplier_on_rest_tiles(rng):
    N = 8
    for _ in range(20):
        m = random_atom(rng, N, int(rng.choice([1, 2, 4])), 1.5)
        I = DyadicInterval(int(rng.integers(1, N)), 0)
        I = DyadicInterval(I.level, int(rng.integers(1 << I.level)))
        _, rest = tile_partition(m, I, N)
        g = sum((rng.standard_normal() * wave_packet(p, N) for p in rest), np.zeros(1 << N))
        assert_allclose(apply(m, g), apply(induce(m, I), g), atol=1e-10)


def test_tile_partition_requires_adapted_root():
    m = AtomRq1(1.0, 1, {4: [(9, 16)]})
    with pytest.raises(ValueError):
        tile_partition(m, DyadicInterval(2, 0), 6, root=DyadicInterval(1, 0))
