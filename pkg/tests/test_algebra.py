import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singlequery.algebra import (
    DigitString,
    GeneratorSet,
    all_strings,
    dot_mod,
    expand_member,
    hamming_and_weight,
    is_linearly_independent,
    member_table,
    random_generators,
    rank_mod_p,
    walsh_generators,
)
from singlequery.errors import DimensionError, DomainError


def ds(text, modulus=2):
    return DigitString.parse(text, modulus)


def binary_pairs(max_n=12):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(0, 1), min_size=n, max_size=n),
            st.lists(st.integers(0, 1), min_size=n, max_size=n),
        )
    )


# --- DigitString -----------------------------------------------------------


def test_parse_and_display_round_trip():
    assert str(ds("00110011")) == "00110011"
    assert ds("(1,2,0)", 3).digits == (1, 2, 0)
    assert str(DigitString((1, 11, 0), 12)) == "(1,11,0)"


@pytest.mark.parametrize("digits, modulus", [((0, 2), 2), ((), 2), ((1,), 1), ((-1,), 3)])
def test_invalid_strings_rejected(digits, modulus):
    with pytest.raises(DomainError):
        DigitString(digits, modulus)


def test_index_is_little_endian():
    assert ds("100").index == 1
    assert ds("001").index == 4
    assert DigitString.from_index(5, 3, 3).digits == (2, 1, 0)
    for j, row in enumerate(all_strings(3, 3)):
        assert DigitString(tuple(row), 3).index == j


def test_addition_is_digitwise_mod_a():
    assert (ds("(2,1)", 3) + ds("(2,2)", 3)).digits == (1, 0)
    assert (ds("(0,1)", 3) - ds("(1,2)", 3)).digits == (2, 2)


# --- dot_mod and the spring-scale weight ------------------------------------


@pytest.mark.parametrize(
    "x, y, a, expected",
    [("0000", "1011", 2, 0), ("0101", "0011", 2, 1), ("(1,1)", "(1,2)", 3, 0)],
)
def test_dot_mod_examples(x, y, a, expected):
    assert dot_mod(ds(x, a), ds(y, a), a) == expected


def test_dot_mod_length_mismatch():
    with pytest.raises(DimensionError):
        dot_mod(ds("01"), ds("011"), 2)


@pytest.mark.parametrize("x, y, expected", [("1111", "0000", 0), ("1101", "1011", 2), ("1010", "1010", 2)])
def test_hamming_and_weight_examples(x, y, expected):
    assert hamming_and_weight(ds(x), ds(y)) == expected


def test_hamming_and_weight_length_mismatch():
    with pytest.raises(DimensionError):
        hamming_and_weight(ds("1"), ds("11"))


@given(binary_pairs())
def test_weight_parity_equals_dot(pair):
    x, y = (DigitString(tuple(v), 2) for v in pair)
    assert hamming_and_weight(x, y) % 2 == dot_mod(x, y, 2)


# --- Walsh generators -------------------------------------------------------


@pytest.mark.parametrize("k, expected", [(1, "01010101"), (2, "00110011"), (3, "00001111")])
def test_walsh_generators_n8(k, expected):
    assert str(walsh_generators(8)[k - 1]) == expected


@pytest.mark.parametrize("n", [2, 4, 8, 16, 64, 256])
def test_walsh_generators_are_independent_and_balanced(n):
    gens = walsh_generators(n)
    assert gens.m == n.bit_length() - 1
    assert all(g.weight == n // 2 for g in gens)
    assert is_linearly_independent(gens, 2)


@pytest.mark.parametrize("n", [0, 1, 3, 6, 12])
def test_walsh_generators_need_power_of_two(n):
    with pytest.raises(DomainError):
        walsh_generators(n)


# --- expand_member ----------------------------------------------------------


def test_expand_member_examples():
    w4 = walsh_generators(4)
    assert str(expand_member(w4, ds("00"))) == "0000"
    assert str(expand_member(w4, ds("11"))) == "0110"
    gens = GeneratorSet((ds("(1,1)", 3), ds("(0,2)", 3)))
    assert expand_member(gens, ds("(2,1)", 3)).digits == (2, 1)


def test_expand_member_rejects_mismatch():
    with pytest.raises(DimensionError):
        expand_member(walsh_generators(4), ds("111"))
    with pytest.raises(DimensionError):
        expand_member(walsh_generators(4), ds("(1,1)", 3))


def _independent_set(n, m, a, seed):
    return random_generators(n, m, a, seed)


@pytest.mark.parametrize("a, n, m", [(2, 8, 3), (2, 6, 6), (3, 5, 3), (5, 4, 2), (3, 4, 4)])
def test_expand_member_is_a_homomorphism(a, n, m):
    gens = _independent_set(n, m, a, seed=a * 100 + n)
    members = all_strings(m, a)
    for s_row, t_row in itertools.product(members, repeat=2):
        s, t = DigitString(tuple(s_row), a), DigitString(tuple(t_row), a)
        assert expand_member(gens, s + t) == expand_member(gens, s) + expand_member(gens, t)


@pytest.mark.parametrize("a, n, m", [(2, 12, 12), (3, 7, 7), (5, 6, 5), (2, 10, 4), (3, 8, 6)])
def test_members_are_distinct_and_table_matches(a, n, m):
    gens = _independent_set(n, m, a, seed=7)
    table = member_table(gens)
    assert table.shape == (a**m, n)
    assert len({row.tobytes() for row in table.astype(np.int64)}) == a**m
    np.testing.assert_array_equal(table, all_strings(m, a) @ gens.matrix() % a)
    for j in range(0, a**m, max(1, a**m // 17)):
        s = DigitString.from_index(j, m, a)
        assert tuple(table[j]) == expand_member(gens, s).digits


# --- linear independence -----------------------------------------------------


def _brute_force_independent(rows, a):
    m = len(rows)
    arr = np.array(rows)
    for coeffs in itertools.product(range(a), repeat=m):
        if any(coeffs) and not np.any(np.array(coeffs) @ arr % a):
            return False
    return True


def test_independence_examples():
    assert is_linearly_independent([ds("01"), ds("10")], 2)
    assert not is_linearly_independent([ds("01"), ds("01")], 2)


def test_pair_over_z3_checked_by_exhaustion():
    rows = [ds("(1,2)", 3), ds("(2,1)", 3)]
    # 1*(1,2) + 1*(2,1) = (3,3) = 0 mod 3, so the pair is dependent
    assert not _brute_force_independent([r.digits for r in rows], 3)
    assert not is_linearly_independent(rows, 3)


@settings(max_examples=150, deadline=None)
@given(
    st.sampled_from([2, 3, 5]),
    st.integers(1, 4),
    st.integers(1, 5),
    st.data(),
)
def test_independence_matches_brute_force(a, m, n, data):
    rows = data.draw(
        st.lists(st.lists(st.integers(0, a - 1), min_size=n, max_size=n), min_size=m, max_size=m)
    )
    strings = [DigitString(tuple(r), a) for r in rows]
    assert is_linearly_independent(strings, a) == _brute_force_independent(rows, a)
    assert (rank_mod_p(np.array(rows), a) == m) == _brute_force_independent(rows, a)


@pytest.mark.parametrize("a", [4, 6, 9])
def test_composite_modulus_rejected(a):
    with pytest.raises(DomainError):
        is_linearly_independent([DigitString((1, 0), a)], a)


# --- random generators --------------------------------------------------------


def test_random_generators_examples():
    full = random_generators(4, 4, 2, seed=11)
    assert rank_mod_p(full.matrix(), 2) == 4
    assert random_generators(8, 3, 2, seed=7) == random_generators(8, 3, 2, seed=7)
    assert is_linearly_independent(random_generators(6, 3, 3, seed=1), 3)


def test_random_generators_infeasible():
    with pytest.raises(DomainError):
        random_generators(3, 4, 2, seed=0)
    with pytest.raises(DomainError):
        random_generators(4, 2, 4, seed=0)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_random_generators_always_independent(a, n, seed):
    m = 1 + seed % n
    gens = random_generators(n, m, a, seed)
    assert gens.m == m and gens.n == n and gens.modulus == a
    assert is_linearly_independent(gens, a)


def test_generator_set_validates_shape():
    with pytest.raises(DimensionError):
        GeneratorSet((ds("01"), ds("011")))
    with pytest.raises((DimensionError, DomainError)):
        GeneratorSet((ds("1"), ds("1")))


def test_generator_set_rejects_dependent_rows():
    with pytest.raises(DomainError):
        GeneratorSet((ds("(1,2)", 3), ds("(2,1)", 3)))
    with pytest.raises(DomainError):
        GeneratorSet((ds("0110"), ds("1010"), ds("1100")))
