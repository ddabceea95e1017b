from fractions import Fraction

import pytest

from pseudochart.exactpoly import (
    EMPTY,
    GF,
    INCONCLUSIVE,
    QQ,
    WITNESS,
    MultiPoly,
    certify_no_common_zero,
    rational_roots_with_completeness,
    search_witness,
    unconstrained_vars,
)


def qp(vars_, terms):
    return MultiPoly(QQ, vars_, [(e, Fraction(c)) for e, c in terms])


def test_rational_roots_with_completeness():
    # (t-1)(t-2) = t^2 - 3t + 2: all roots rational -> complete
    roots, complete = rational_roots_with_completeness(
        [Fraction(2), Fraction(-3), Fraction(1)])
    assert sorted(r for r, _ in roots) == [1, 2] and complete
    # t^2 - 2: no rational roots, deflation incomplete
    roots, complete = rational_roots_with_completeness(
        [Fraction(-2), Fraction(0), Fraction(1)])
    assert roots == [] and not complete
    # monomial 3 t^4: root 0 with multiplicity 4, complete
    roots, complete = rational_roots_with_completeness(
        [Fraction(0)] * 4 + [Fraction(3)])
    assert roots == [(Fraction(0), 4)] and complete
    # rational root with denominator: 2t - 1
    roots, complete = rational_roots_with_completeness([Fraction(-1), Fraction(2)])
    assert roots == [(Fraction(1, 2), 1)] and complete


def test_empty_by_coprime_pair():
    t = MultiPoly.variable(QQ, ("t",), "t")
    one = MultiPoly.constant(QQ, ("t",), 1)
    out = certify_no_common_zero([t * t + one, t])
    assert out.status == EMPTY


def test_witness_found_and_verified():
    vars_ = ("x", "y")
    x = MultiPoly.variable(QQ, vars_, "x")
    y = MultiPoly.variable(QQ, vars_, "y")
    out = certify_no_common_zero([x - y, x + y])
    assert out.status == WITNESS
    assert out.witness == (Fraction(0), Fraction(0))


def test_empty_through_specialization():
    # the plane-chart component system: eliminants share only the origin,
    # which does not extend
    vars_ = ("t0", "t1")
    t0 = MultiPoly.variable(QQ, vars_, "t0")
    t1 = MultiPoly.variable(QQ, vars_, "t1")
    one = MultiPoly.constant(QQ, vars_, 1)
    g0 = t0 * t1
    g1 = (t0 * t0 + one) * t1 + t0 * (t1 * t1 + one)
    g2 = (t0 * t0 + one) * (t1 * t1 + one)
    out = certify_no_common_zero([g0, g1, g2])
    assert out.status == EMPTY


def test_finite_field_witness():
    f5 = GF(5)
    vars_ = ("x", "y")
    x = MultiPoly.variable(f5, vars_, "x")
    y = MultiPoly.variable(f5, vars_, "y")
    two = MultiPoly.constant(f5, vars_, 2)
    out = certify_no_common_zero([x - two, y - two])
    assert out.status == WITNESS
    assert out.witness == (2, 2)


def test_irrational_common_zero_is_inconclusive_or_witnessed_modularly():
    # x^2 - 2 and y: common zeros at (±sqrt 2, 0); no rational witness
    vars_ = ("x", "y")
    x = MultiPoly.variable(QQ, vars_, "x")
    y = MultiPoly.variable(QQ, vars_, "y")
    two = MultiPoly.constant(QQ, vars_, 2)
    out = certify_no_common_zero([x * x - two, y])
    # 2 is a quadratic residue mod 7, so the finite-field hunt can witness
    assert out.status in (WITNESS, INCONCLUSIVE)
    if out.status == WITNESS:
        f = out.witness_field
        assert f.is_zero((x * x - two).convert_field(f).evaluate(out.witness))


def test_unconstrained_vars():
    vars_ = ("x", "y")
    x = MultiPoly.variable(QQ, vars_, "x")
    assert unconstrained_vars([x]) == ["y"]
    y = MultiPoly.variable(QQ, vars_, "y")
    assert unconstrained_vars([x, y]) == []


def test_search_witness_grid():
    vars_ = ("x", "y")
    x = MultiPoly.variable(QQ, vars_, "x")
    y = MultiPoly.variable(QQ, vars_, "y")
    one = MultiPoly.constant(QQ, vars_, 1)
    found = search_witness([x - one, y + one])
    assert found is not None
    point, field = found
    assert point == (Fraction(1), Fraction(-1))


def test_empty_system_rejected():
    with pytest.raises(ValueError):
        certify_no_common_zero([])
