from fractions import Fraction

import numpy as np
import pytest

from uqbethe.exact import Resample, equal, invert, is_zero, matrix
from uqbethe.gauss import (
    FLAVORS,
    appendix_a_violations,
    composed_current,
    current_e,
    current_f,
    current_modes,
    current_relation_violations,
    gauss_by_ldu,
    gauss_extract,
    mode_coefficient,
    pointwise_relation_violations,
    pointwise_serre_violations,
    quasidet_lower_right,
    quasidet_upper_left,
    reconstruct_l,
    relation_table,
    serre_current_violations,
    support_violations,
)
from uqbethe.gln_rep import eval_l, tensor_l, tensor_power, vector_rep


def eval_pair(q, N, z, factors=1):
    m = tensor_power(vector_rep(N, q), factors)
    return eval_l(m, z, "plus"), eval_l(m, z, "minus")


def tensor_pair(q, N, zs):
    v = vector_rep(N, q)
    lp, lm = eval_l(v, zs[0], "plus"), eval_l(v, zs[0], "minus")
    for z in zs[1:]:
        lp, lm = tensor_l(lp, eval_l(v, z, "plus")), tensor_l(lm, eval_l(v, z, "minus"))
    return lp, lm


def test_scalar_quasideterminants():
    a, b, c, d = (matrix([[x]]) for x in (2, 3, 5, 7))
    T = [[a, b], [c, d]]
    assert quasidet_lower_right(T)[0, 0] == Fraction(7) - Fraction(15, 2)
    assert quasidet_upper_left(T)[0, 0] == Fraction(2) - Fraction(15, 7)


def test_first_flavor_small_cases(rnd):
    q, z, t = rnd.q(), rnd(), rnd()
    lp, lm = eval_pair(q, 2, z)
    g = gauss_extract(lp, lm, t, "first")
    assert equal(g.plus.k[1], lp(t)[0, 0])
    assert equal(g.minus.k[1], lm(t)[0, 0])
    assert equal(g.plus.F[(2, 1)], lp(t)[0, 1] @ invert(g.plus.k[1]))


CASES = [
    ("V2", lambda q, r: eval_pair(q, 2, r())),
    ("V3", lambda q, r: eval_pair(q, 3, r())),
    ("V4", lambda q, r: eval_pair(q, 4, r())),
    ("Ev(V2xV2)", lambda q, r: eval_pair(q, 2, r(), 2)),
    ("Ev(V3xV3)", lambda q, r: eval_pair(q, 3, r(), 2)),
    ("V2(x)V2", lambda q, r: tensor_pair(q, 2, r.many(2))),
    ("V3(x)V3", lambda q, r: tensor_pair(q, 3, r.many(2))),
]


@pytest.mark.parametrize("name,build", CASES, ids=[c[0] for c in CASES])
@pytest.mark.parametrize("flavor", FLAVORS)
def test_round_trip_and_elimination_cross_check(rnd, name, build, flavor):
    q = rnd.q()
    lp, lm = build(q, rnd)
    N = lp.N
    for _ in range(3):
        t = rnd()
        g = gauss_extract(lp, lm, t, flavor)
        rp, rm = reconstruct_l(g, N)
        for grid, l in ((rp, lp), (rm, lm)):
            direct = l(t)
            for i in range(N):
                for j in range(N):
                    assert equal(grid[i][j], direct[i, j])
        for coords, l in ((g.plus, lp), (g.minus, lm)):
            grid = l(t)
            other = gauss_by_ldu([[grid[i, j] for j in range(N)] for i in range(N)], N, flavor)
            for kind in ("F", "E", "k"):
                for key, x in getattr(coords, kind).items():
                    assert equal(x, getattr(other, kind)[key])


def test_flavors_differ_but_rebuild_same_l(rnd):
    q, z, t = rnd.q(), rnd(), rnd()
    lp, lm = eval_pair(q, 3, z)
    g1 = gauss_extract(lp, lm, t, "first")
    g2 = gauss_extract(lp, lm, t, "second")
    assert not equal(g1.plus.k[1], g2.plus.k[1])
    r1, _ = reconstruct_l(g1, 3)
    r2, _ = reconstruct_l(g2, 3)
    for i in range(3):
        for j in range(3):
            assert equal(r1[i][j], r2[i][j])


def test_pointwise_total_current_vanishes_on_evaluation_module(rnd):
    # L^-(u) = -(u/z) L^+(u) here, so F^+ and F^- agree as functions of t
    q, z, t = rnd.q(), rnd(), rnd()
    lp, lm = eval_pair(q, 2, z)
    g = gauss_extract(lp, lm, t, "first")
    assert not is_zero(g.plus.F[(2, 1)])
    e1 = np.array([Fraction(1), Fraction(0)], dtype=object)
    assert is_zero(current_f(g, 1) @ e1)
    assert is_zero(current_e(g, 1))


def test_composed_current_shapes(rnd):
    q, z, t = rnd.q(), rnd(), rnd()
    lp, lm = eval_pair(q, 3, z)
    for flavor in FLAVORS:
        g = gauss_extract(lp, lm, t, flavor)
        assert equal(composed_current(g, 2, 1, q), current_f(g, 1))
    g = gauss_extract(lp, lm, t, "first")
    assert equal(composed_current(g, 3, 1, q), (q - 1 / q) * (current_f(g, 2) @ current_f(g, 1)))
    with pytest.raises(IndexError):
        composed_current(g, 1, 2, q)


@pytest.mark.parametrize("flavor", FLAVORS)
def test_pointwise_relations_hold(rnd, flavor):
    q, z = rnd.q(), rnd()
    lp, lm = eval_pair(q, 3, z)
    a, b, c = rnd.many(3)
    assert pointwise_relation_violations(lp, lm, q, a, b, flavor) == []
    assert pointwise_serre_violations(lp, lm, q, a, b, c, flavor) == []


def test_appendix_a_pointwise(rnd):
    q, z = rnd.q(), rnd()
    lp, lm = eval_pair(q, 4, z)
    a, b = rnd.many(2)
    assert appendix_a_violations(lp, lm, q, a, b) == []
    with pytest.raises(Resample):
        appendix_a_violations(lp, lm, q, a, a)
    with pytest.raises(Resample):
        appendix_a_violations(lp, lm, q, a, q * q * a)


MODE_PAIRS = [(m, n) for m in range(-3, 4) for n in range(-3, 4)]


@pytest.mark.parametrize("flavor", FLAVORS)
@pytest.mark.parametrize("N,factors", [(2, 1), (3, 1), (2, 2)])
def test_mode_relations(flavor, N, factors):
    q, z = Fraction(7, 4), Fraction(3, 11)
    lp, lm = eval_pair(q, N, z, factors)
    cm = current_modes(lp, lm, q, flavor, K=4)
    assert current_relation_violations(cm, MODE_PAIRS) == []
    assert support_violations(cm) == []
    # the modes carry content: some F and E modes are nonzero
    assert any(not is_zero(cm.F[(2, 1)][n]) for n in range(-4, 5))
    assert any(not is_zero(cm.E[(1, 2)][n]) for n in range(-4, 5))


@pytest.mark.parametrize("flavor", FLAVORS)
def test_mode_serre(flavor):
    q, z = Fraction(7, 4), Fraction(3, 11)
    lp, lm = eval_pair(q, 3, z, 2)
    cm = current_modes(lp, lm, q, flavor, K=3)
    triples = [(a, b, c) for a in range(-2, 3) for b in range(-2, 3) for c in (-1, 0, 1)]
    assert serre_current_violations(cm, triples) == []


def test_mode_relations_detect_the_other_flavor_table():
    # sensitivity: the FF relation of one flavor fails on the modes of the other
    q, z = Fraction(7, 4), Fraction(3, 11)
    lp, lm = eval_pair(q, 2, z, 2)
    cm = current_modes(lp, lm, q, "first", K=4)
    wrong = relation_table(q, "second")["FF_same"]
    F = cm.F[(2, 1)]
    assert any(not is_zero(mode_coefficient(F, F, wrong, m, n)) for m, n in MODE_PAIRS)
