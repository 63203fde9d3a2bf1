from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import fractions, generic_q
from uqbethe.exact import Resample, equal, identity
from uqbethe.rmatrix import (
    RPoint,
    build_r,
    build_r_product,
    check_ybe,
    embed,
    r_matrix,
    r_product_pairs,
    swap,
    ybe_sides,
)


def test_exchange_coefficient_example():
    r = r_matrix(2, 3, 2, 1)
    # row (1,2), column (2,1) in 0-based flattened indices 1 and 2
    assert r[1, 2] == Fraction(16, 17)


def test_equal_points_give_swap():
    for N in (2, 3, 4):
        assert equal(r_matrix(N, Fraction(5, 3), Fraction(7, 2), Fraction(7, 2)), swap(N))


def test_q_one_gives_identity():
    assert equal(r_matrix(3, 1, Fraction(2), Fraction(9, 4)), identity(9))


def test_denominator_guard():
    with pytest.raises(Resample):
        RPoint(2, Fraction(1), Fraction(4), Fraction(2))  # q u - v/q = 0
    with pytest.raises(ValueError):
        RPoint(2, Fraction(1), Fraction(2), Fraction(0))


@settings(max_examples=40, deadline=None)
@given(generic_q, fractions, fractions, fractions)
def test_ybe_n2(q, u, v, w):
    try:
        assert check_ybe(2, q, u, v, w)
    except Resample:
        pass


@pytest.mark.parametrize("N", [3, 4])
def test_ybe_higher_rank(rnd, N):
    for _ in range(3):
        assert check_ybe(N, rnd.q(), rnd(), rnd(), rnd())


def test_ybe_equal_points():
    assert check_ybe(3, Fraction(2), Fraction(5), Fraction(5), Fraction(5))


def test_sparse_sides_match_dense(rnd):
    q, u, v, w = rnd.q(), rnd(), rnd(), rnd()
    lhs, rhs = ybe_sides(3, q, u, v, w)
    r12 = embed(r_matrix(3, q, u, v), 3, 3, (1, 2))
    r13 = embed(r_matrix(3, q, u, w), 3, 3, (1, 3))
    r23 = embed(r_matrix(3, q, v, w), 3, 3, (2, 3))
    assert equal(lhs, r12 @ r13 @ r23)
    assert equal(rhs, r23 @ r13 @ r12)


def test_embed_reversed_legs_is_conjugation_by_swap(rnd):
    r = r_matrix(2, rnd.q(), rnd(), rnd())
    p = swap(2)
    assert equal(embed(r, 2, 2, (2, 1)), p @ r @ p)


def test_product_pair_order_against_sorter():
    for M in range(1, 6):
        pairs = [(j, i) for j in range(1, M + 1) for i in range(1, j)]
        # R^(ji) left of R^(ml) iff j > m, or j == m and i > l
        expected = sorted(pairs, key=lambda p: (-p[0], -p[1]))
        assert r_product_pairs(M) == expected


def test_product_small_cases(rnd):
    q, a, b, c = rnd.q(), rnd(), rnd(), rnd()
    assert equal(build_r_product(2, q, [a]), identity(2))
    assert equal(build_r_product(2, q, [a, b]), embed(r_matrix(2, q, b, a), 2, 2, (2, 1)))
    expected = (embed(r_matrix(2, q, c, b), 2, 3, (3, 2)) @ embed(r_matrix(2, q, c, a), 2, 3, (3, 1))
                @ embed(r_matrix(2, q, b, a), 2, 3, (2, 1)))
    assert equal(build_r_product(2, q, [a, b, c]), expected)


def test_build_r_matches_point_wrapper():
    p = RPoint(3, Fraction(2), Fraction(3), Fraction(5, 7))
    assert equal(build_r(p), r_matrix(3, Fraction(5, 7), 2, 3))
