import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayleysum.errors import GroupError, SizeLimitError
from cayleysum.groups import format_group, is_prime, make_group, parse_group, prev_prime

moduli_st = st.lists(st.integers(2, 9), min_size=1, max_size=3)


def test_parse_examples():
    assert parse_group("Z7").moduli == (7,)
    assert parse_group("Z5xZ25").order == 125
    assert parse_group("z2^4").moduli == (2, 2, 2, 2)
    assert format_group(parse_group("Z2^3xZ5")) == "Z2^3xZ5"


@pytest.mark.parametrize("bad", ["", "Z", "Z0", "Z 7", "Q7", "Z7x", "Z2^0", "7"])
def test_parse_rejects(bad):
    with pytest.raises(GroupError):
        parse_group(bad)


def test_size_limit():
    with pytest.raises(SizeLimitError):
        make_group((2**21,))


def test_paper_assumption_flag():
    assert make_group((1009,)).paper_assumption_ok
    assert not make_group((3, 5)).paper_assumption_ok
    assert not make_group((2, 2)).paper_assumption_ok


@given(moduli_st, st.data())
def test_rank_roundtrip(moduli, data):
    g = make_group(moduli)
    i = data.draw(st.integers(0, g.order - 1))
    assert g.rank(g.unrank(i)) == i


@given(moduli_st, st.data())
def test_group_axioms(moduli, data):
    g = make_group(moduli)
    idx = st.integers(0, g.order - 1)
    a, b, c = (g.unrank(data.draw(idx)) for _ in range(3))
    assert g.add(a, b) == g.add(b, a)
    assert g.add(g.add(a, b), c) == g.add(a, g.add(b, c))
    assert g.add(a, g.neg(a)) == g.identity()
    assert g.scalar_mul(3, a) == g.add(a, g.add(a, a))


@given(st.lists(st.integers(2, 9), min_size=1, max_size=2))
def test_vectorized_matches_scalar(moduli):
    g = make_group(moduli)
    r = np.arange(g.order)
    table = g.add_table()
    for i in range(g.order):
        expect = [g.rank(g.add(g.unrank(i), g.unrank(j))) for j in range(g.order)]
        assert table[i].tolist() == expect
    assert (g.add_ranks(r, g.neg_ranks(r)) == 0).all()
    assert (g.sub_ranks(g.add_ranks(r, 1), 1) == r).all()


@given(st.lists(st.sampled_from([3, 5, 7, 9]), min_size=1, max_size=3))
def test_halving_in_odd_groups(moduli):
    g = make_group(moduli)
    r = np.arange(g.order)
    assert (g.scale_ranks(2, g.halve_ranks(r)) == r).all()


def test_halving_refuses_even():
    with pytest.raises(GroupError):
        make_group((4,)).halve_ranks(np.arange(4))


def test_characters():
    g = make_group((5,))
    assert g.character_value(2, 3) == pytest.approx(cmath.exp(2j * cmath.pi * 6 / 5))
    h = make_group((3, 5))
    # characters are homomorphisms in x
    for gamma in [(1, 2), (2, 4)]:
        for x, y in [((1, 1), (2, 3)), ((0, 4), (1, 4))]:
            lhs = h.character_value(gamma, h.add(x, y))
            rhs = h.character_value(gamma, x) * h.character_value(gamma, y)
            assert lhs == pytest.approx(rhs)


def test_primes():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert prev_prime(1024) == 1021
    assert prev_prime(4096) == 4093
