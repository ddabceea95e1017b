import random

import pytest
from fractions import Fraction

from pseudochart.exactpoly import (
    CC,
    GF,
    QQ,
    ExtensionField,
    FieldMismatchError,
    NotInvertibleError,
    is_prime,
)


def test_rational_lowest_terms():
    x = QQ.coerce("6/4")
    assert x.numerator == 3 and x.denominator == 2
    y = QQ.coerce(Fraction(-3, -6))
    assert y.numerator == 1 and y.denominator == 2


def test_prime_field_basics():
    f = GF(11)
    assert f.add(7, 8) == 4
    assert f.mul(7, 8) == 1
    assert f.inv(3) == 4
    assert f.eq(f.mul(3, f.inv(3)), 1)
    with pytest.raises(NotInvertibleError):
        f.inv(0)


def test_prime_validation():
    with pytest.raises(ValueError):
        GF(10)
    assert is_prime(101) and not is_prime(1)


def test_extension_field_modulus_is_deterministic():
    a = ExtensionField(5, 2)
    b = ExtensionField(5, 2)
    assert a.modulus == b.modulus
    assert GF(5, 2) == GF(5, 2)
    # modulus is monic irreducible of degree 2
    assert a.modulus[-1] == 1 and len(a.modulus) == 3


def test_extension_field_arithmetic():
    f = GF(7, 2)
    rng = random.Random(3)
    for _ in range(50):
        x = f.random_element(rng)
        y = f.random_element(rng)
        z = f.random_element(rng)
        assert f.eq(f.add(x, y), f.add(y, x))
        assert f.eq(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)))
        if not f.is_zero(x):
            assert f.eq(f.mul(x, f.inv(x)), f.one())


def test_extension_field_order():
    f = GF(3, 2)
    elems = list(f.elements())
    assert len(elems) == 9
    assert len(set(elems)) == 9
    # multiplicative group of order 8
    x = f.generator()
    assert f.eq(f.pow(x, 8), f.one())


def test_field_mismatch_is_rejected():
    with pytest.raises(FieldMismatchError):
        GF(5).require_same(GF(7))
    with pytest.raises(FieldMismatchError):
        QQ.require_same(GF(5))


def test_conversions():
    f5 = GF(5)
    assert f5.convert(Fraction(1, 2), QQ) == 3  # 1/2 = 1 * inv(2) = 3 mod 5
    with pytest.raises(NotInvertibleError):
        f5.convert(Fraction(1, 5), QQ)
    assert CC.convert(Fraction(1, 4), QQ) == 0.25
    f25 = GF(5, 2)
    assert f25.convert(3, GF(5)) == f25.from_int(3)


def test_subfield_embedding_respects_arithmetic():
    small = GF(3, 2)
    big = GF(3, 4)
    rng = random.Random(9)
    for _ in range(20):
        x = small.random_element(rng)
        y = small.random_element(rng)
        ex = big.convert(x, small)
        ey = big.convert(y, small)
        assert big.eq(big.mul(ex, ey), big.convert(small.mul(x, y), small))
        assert big.eq(big.add(ex, ey), big.convert(small.add(x, y), small))


def test_element_json_round_trip():
    f = GF(7, 3)
    rng = random.Random(1)
    for _ in range(10):
        x = f.random_element(rng)
        assert f.element_from_json(f.element_to_json(x)) == x
    q = Fraction(-22, 7)
    assert QQ.element_from_json(QQ.element_to_json(q)) == q
