import random
from fractions import Fraction

import pytest

from pseudochart.exactpoly import (
    GF,
    QQ,
    MultiPoly,
    NumericRootError,
    ZeroPolynomialError,
    complex_roots,
    complex_roots_from_coeffs,
    finite_field_roots,
    univariate_roots,
)


def fpoly(field, coeffs):
    return MultiPoly(field, ("t",), [((i,), c) for i, c in enumerate(coeffs)])


def test_roots_over_f5():
    f5 = GF(5)
    p = fpoly(f5, [1, 0, 1])  # t^2 + 1
    roots = {r for r, _ in finite_field_roots(p)}
    assert roots == {2, 3}  # 2^2 = 4 = -1, 3^2 = 9 = -1 mod 5


def test_roots_over_f7_empty():
    f7 = GF(7)
    p = fpoly(f7, [1, 0, 1])
    assert finite_field_roots(p) == []  # -1 is a non-residue mod 7
    # but they exist in F_49
    f49 = GF(7, 2)
    roots = finite_field_roots(p.convert_field(f49))
    assert len(roots) == 2


def test_complex_roots_of_t2_plus_1():
    p = fpoly(QQ, [Fraction(1), Fraction(0), Fraction(1)])
    roots = complex_roots(p)
    values = sorted((r.imag for r, _ in roots))
    assert len(roots) == 2
    assert abs(values[0] + 1) < 1e-9 and abs(values[1] - 1) < 1e-9


def test_multiplicity_deflation():
    f5 = GF(5)
    # (t-2)^2 (t-3) = t^3 - 7t^2 + 16t - 12
    p = fpoly(f5, [(-12) % 5, 16 % 5, (-7) % 5, 1])
    found = dict(finite_field_roots(p))
    assert found[2] == 2 and found[3] == 1
    assert sum(found.values()) <= 3


def test_multiplicity_clustering_numeric():
    # (t-1)^2 (t+2) = t^3 - 3t + 2
    roots = complex_roots_from_coeffs([2, -3, 0, 1])
    by_mult = sorted((m, round(r.real)) for r, m in roots)
    assert by_mult == [(1, -2), (2, 1)]


def test_zero_polynomial_signals_positive_dimension():
    p = MultiPoly.zero(QQ, ("t",))
    with pytest.raises(ZeroPolynomialError):
        complex_roots(p)
    with pytest.raises(ZeroPolynomialError):
        finite_field_roots(MultiPoly.zero(GF(5), ("t",)))


def test_constant_has_no_roots():
    assert complex_roots(MultiPoly.constant(QQ, ("t",), 3)) == []
    assert finite_field_roots(MultiPoly.constant(GF(5), ("t",), 3)) == []


def test_random_roots_verify_exactly():
    rng = random.Random(17)
    f11 = GF(11)
    for _ in range(25):
        p = fpoly(f11, [rng.randrange(11) for _ in range(rng.randint(2, 5))])
        if p.is_zero:
            continue
        for r, m in finite_field_roots(p):
            assert f11.is_zero(p.evaluate([r]))
            assert m >= 1
        assert sum(m for _, m in finite_field_roots(p)) <= max(p.degree_in("t"), 0)


def test_durand_kerner_known_roots():
    # roots 1..8: coefficients of prod (t - k)
    coeffs = [1]
    for k in range(1, 9):
        new = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i + 1] += c
            new[i] += -k * c
        coeffs = new
    roots = complex_roots_from_coeffs([complex(c) for c in coeffs])
    reals = sorted(r.real for r, _ in roots)
    assert len(roots) == 8
    for got, want in zip(reals, range(1, 9)):
        assert abs(got - want) < 1e-7


def test_dispatcher():
    p = fpoly(GF(5), [1, 0, 1])
    assert {r for r, _ in univariate_roots(p)} == {2, 3}
    q = fpoly(QQ, [Fraction(-1), Fraction(0), Fraction(1)])
    roots = univariate_roots(q, backend="complex_numeric")
    assert sorted(round(r.real) for r, _ in roots) == [-1, 1]
    with pytest.raises(ValueError):
        univariate_roots(q, backend="magic")
