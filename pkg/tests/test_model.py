from fractions import Fraction

import pytest

from shiftk import FiniteModel, ValidationError, run_all_checks
from shiftk.model import (
    RationalSpan,
    fn_compose_shift,
    fn_prepend,
    fn_transfer,
    flatten,
    indicator_cylinder,
    mat_identity,
    mat_mul,
    monomial,
    monomial_span,
    op_diagonal,
    op_lambda_shift,
    op_word,
    preimage_count_function,
)

from conftest import FINITE_MODEL_NAMES, make

F = Fraction


def model(name):
    return FiniteModel(make(name))


def as_int_lists(m):
    return [[int(x) for x in row] for row in m]


# ---------------------------------------------------------------------------
# operators


def test_word_operator_examples():
    pair = model("pair")
    # basis order is ((0)*, 1(0)*)
    assert as_int_lists(op_word(pair, (1,))) == [[0, 0], [1, 0]]
    assert as_int_lists(op_word(pair, (0,))) == [[1, 0], [0, 0]]
    assert op_word(pair, ()) == mat_identity(2)


def test_diagonal_operator_examples():
    pair = model("pair")
    assert op_diagonal(pair, (F(1), F(1))) == mat_identity(2)
    z1 = indicator_cylinder(pair, (), (1,))
    assert as_int_lists(op_diagonal(pair, z1)) == [[0, 0], [0, 1]]
    c1 = indicator_cylinder(pair, (1,), ())
    assert as_int_lists(op_diagonal(pair, c1)) == [[1, 0], [0, 0]]


def test_function_examples():
    pair = model("pair")
    ones = (F(1), F(1))
    assert fn_transfer(pair, ones) == (F(1), F(0))
    assert fn_prepend(pair, (1,), ones) == (F(1), F(0))
    single = model("single_point")
    f = (F(3, 7),)
    assert fn_compose_shift(single, f) == f


def test_preimage_counts():
    pair = model("pair")
    assert preimage_count_function(pair, 1) == (F(2), F(2))
    chain3 = model("chain3")
    # shift^2 maps everything to (0)*, so every point has three 2-step siblings
    assert preimage_count_function(chain3, 2) == (F(3), F(3), F(3))


def test_transfer_is_flat_not_iterated():
    pair = model("pair")
    f = (F(1), F(0))
    two_step = fn_transfer(pair, f, 2)
    iterated = fn_transfer(pair, fn_transfer(pair, f))
    assert two_step == (F(1, 2), F(0))
    assert iterated == (F(1, 4), F(0))
    assert two_step != iterated


# ---------------------------------------------------------------------------
# identity suites


@pytest.mark.parametrize("name", FINITE_MODEL_NAMES)
def test_all_identity_checks_pass(name):
    reports = run_all_checks(model(name), 3)
    for rep in reports:
        assert rep.ok, f"{name}: {rep.render()}"
        assert rep.checks > 0


def test_model_rejects_foreign_points():
    pair = model("pair")
    from shiftk import Point
    with pytest.raises(ValidationError):
        pair.index(Point((), (1, 0)))


# ---------------------------------------------------------------------------
# monomial span and related linear algebra


@pytest.mark.parametrize("name", ["pair", "two_cycle_fixed"])
def test_monomial_products_stay_in_span(name):
    m = model(name)
    span = monomial_span(m, 2)
    words = m.words_upto(1)
    fs = [indicator_cylinder(m, u, v) for u in words for v in words][:6]
    mons = [monomial(m, u, f, v) for u in words for v in words for f in fs[:3]]
    for x in mons[:12]:
        for y in mons[:12]:
            assert span.contains(flatten(mat_mul(x, y)))


def test_diagonal_embedding_injective():
    m = model("chain3")
    span = RationalSpan(m.n * m.n)
    for i in range(m.n):
        e = tuple(F(1) if j == i else F(0) for j in range(m.n))
        assert span.add(flatten(op_diagonal(m, e)))
    assert span.rank == m.n


def test_lambda_shift_examples():
    single = model("single_point")
    x = ((F(5),),)
    assert op_lambda_shift(single, x) == x
    pair = model("pair")
    zero = ((F(0), F(0)), (F(0), F(0)))
    assert op_lambda_shift(pair, zero) == zero
    # (T_0 + T_1)^t I (T_0 + T_1) with S = [[1,0],[1,0]]
    got = op_lambda_shift(pair, mat_identity(2))
    assert as_int_lists(got) == [[2, 0], [0, 0]]


def test_rational_span_reduction():
    span = RationalSpan(3)
    assert span.add((F(1), F(2), F(0)))
    assert span.add((F(0), F(1), F(1)))
    assert not span.add((F(1), F(0), F(-2)))
    assert span.contains((F(2), F(5), F(1)))
    assert not span.contains((F(0), F(0), F(1)))
