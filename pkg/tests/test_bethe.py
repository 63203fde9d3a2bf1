from fractions import Fraction

import pytest

from conftest import evaluation_task, tensor_task
from uqbethe.bethe import (
    ROUTES,
    BetheTask,
    DimensionCapExceeded,
    bethe_trace,
    bethe_trace_dense,
    bethe_tv_x,
    bethe_tv_y,
    bethe_w_hat,
    compute_route,
    cross_validate,
    tv_y_coefficient,
    tv_y_operator,
    weight_check,
    x_order,
    y_order,
    y_sign,
)
from uqbethe.exact import basis_vector, equal, is_zero, zero_vector
from uqbethe.gln_rep import eval_l, vector_rep
from uqbethe.qsym import Composition, enumerate_admissible_m, make_assignment, q_symmetrize_tv


def test_n2_single_variable_all_routes(rnd):
    for _ in range(3):
        task = evaluation_task(rnd, 2, (1,))
        q = task.q
        expected = (q - 1 / q) * basis_vector(2, 2)
        cv = cross_validate(task, ROUTES)
        assert cv.agree
        for vec in cv.vectors.values():
            assert equal(vec, expected)


def test_n2_two_variables_vanish_on_vector_rep(rnd):
    task = evaluation_task(rnd, 2, (2,))
    assert is_zero(bethe_tv_x(task))
    assert cross_validate(task, ROUTES).agree


@pytest.mark.parametrize("N", [2, 3, 4])
def test_empty_composition_returns_singular_vector(rnd, N):
    task = evaluation_task(rnd, N, (0,) * (N - 1))
    for route in ROUTES:
        assert equal(compute_route(task, route).coords, task.module.singular)
    assert weight_check(task.module.singular, task)


@pytest.mark.parametrize("N,n,factors", [(2, (1,), 2), (2, (2,), 2), (3, (1, 1), 2), (3, (2, 1), 1)])
def test_dense_trace_matches_contraction(rnd, N, n, factors):
    task = evaluation_task(rnd, N, n, factors)
    assert equal(bethe_trace_dense(task), bethe_trace(task))


@pytest.mark.parametrize("N,n", [(3, (1, 1)), (3, (2, 1)), (3, (1, 2)), (4, (1, 1, 1))])
def test_route_agreement_vector_rep(rnd, N, n):
    for _ in range(2):
        task = evaluation_task(rnd, N, n)
        cv = cross_validate(task, ROUTES)
        assert cv.agree, cv.mismatch
        assert all(cv.weights_ok.values())


@pytest.mark.parametrize("N,n", [(2, (2,)), (3, (1, 1)), (3, (2, 1))])
def test_route_agreement_on_chevalley_square(rnd, N, n):
    task = evaluation_task(rnd, N, n, factors=2)
    cv = cross_validate(task, ROUTES)
    assert cv.agree, cv.mismatch
    assert not is_zero(cv.vectors["trace"])


def test_tensor_module_small(rnd):
    task = tensor_task(rnd, 2, (1,), 2)
    cv = cross_validate(task)
    assert cv.agree
    assert not is_zero(cv.vectors["trace"])


def test_closed_formulas_refused_on_tensor_modules(rnd):
    task = tensor_task(rnd, 2, (1,), 2)
    with pytest.raises(ValueError):
        BetheTask(task.comp, task.module, task.lplus, task.t, "tensor", None, ("trace", "tv_x"))


def test_dimension_cap(rnd):
    task = evaluation_task(rnd, 3, (2, 2))
    task.max_cells = 100
    with pytest.raises(DimensionCapExceeded):
        bethe_trace(task)


def test_weight_check_examples():
    q = Fraction(3, 2)
    m = vector_rep(2, q)
    comp = Composition(2, (1,))
    task = BetheTask(comp, m, eval_l(m, 5, "plus"), make_assignment(comp, [2]), "evaluation", Fraction(5))
    assert weight_check(basis_vector(2, 2), task)
    assert not weight_check(basis_vector(2, 1), task)
    assert weight_check(zero_vector(2), task)


def test_orderings():
    assert x_order(3) == [(2, 2), (2, 1), (1, 1)]
    assert y_order(3) == [(1, 1), (2, 1), (2, 2)]
    assert y_order(3, "column_major") == [(2, 1), (1, 1), (2, 2)]
    with pytest.raises(ValueError):
        y_order(3, "spiral")


def test_other_y_readings(rnd):
    task = evaluation_task(rnd, 3, (2, 1), factors=2)
    ref = bethe_trace(task)
    assert equal(bethe_tv_y(task, "row_major"), ref)
    # without the q-power prefactors the column-major reading is the pre-reordering form
    assert equal(bethe_tv_y(task, "column_major", q_powers=False), ref)


def test_printed_w_hat_numerator_fails(rnd):
    task = evaluation_task(rnd, 3, (1, 1))
    ref = bethe_trace(task)
    assert equal(bethe_w_hat(task), ref)
    assert not equal(bethe_w_hat(task, numerator="one"), ref)


def test_unsigned_tv_y_differs_by_per_matrix_sign(rnd):
    task = evaluation_task(rnd, 3, (1, 1))
    ref = bethe_trace(task)
    verbatim = bethe_tv_y(task, signed=False)
    assert not equal(verbatim, ref)
    q = task.q
    terms = {}
    for m in enumerate_admissible_m(task.comp):
        c, op = tv_y_operator(task, m)
        sym = q_symmetrize_tv(lambda tt: tv_y_coefficient(task, m, tt), task.t, q)
        terms[m.rows] = ((q - 1 / q) ** task.comp.total * c * sym) * (op @ task.module.singular)
    # the verbatim terms recombine to the trace with the ratio -1 on odd matrices only
    fixed = sum((y_sign(task, m) * terms[m.rows] for m in enumerate_admissible_m(task.comp)),
                zero_vector(task.module.dim))
    assert equal(fixed, ref)
    odd = [m.rows for m in enumerate_admissible_m(task.comp) if y_sign(task, m) == -1]
    assert odd and not all(is_zero(terms[r]) for r in odd)


def test_trace_is_independent_of_t_for_single_variable(rnd):
    a = evaluation_task(rnd, 2, (1,))
    b = BetheTask(a.comp, a.module, eval_l(a.module, rnd(), "plus"), ((rnd(),),), "evaluation",
                  Fraction(1))
    assert equal(bethe_trace(a), bethe_trace(b))


def test_fingerprint_stable(rnd):
    task = evaluation_task(rnd, 3, (1, 1))
    assert task.fingerprint() == task.fingerprint()
    assert len(task.fingerprint()) == 16
