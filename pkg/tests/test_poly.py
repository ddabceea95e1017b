import json
import random
from fractions import Fraction

import pytest

from pseudochart.exactpoly import (
    GF,
    QQ,
    FieldMismatchError,
    MultiPoly,
    VariableMismatchError,
    poly_arith,
    poly_from_json,
)


def qpoly(vars_, terms):
    return MultiPoly(QQ, vars_, [(e, Fraction(c)) for e, c in terms])


def brute_mul(a, b):
    """Independent dense-dict multiplication oracle."""
    out = {}
    for ea, ca in a.terms:
        for eb, cb in b.terms:
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, a.field.zero())
            out[e] = a.field.add(out[e], a.field.mul(ca, cb))
    return {e: c for e, c in out.items() if not a.field.is_zero(c)}


def test_additive_cancellation():
    t2p1 = qpoly(("t",), [((2,), 1), ((0,), 1)])
    minus1 = qpoly(("t",), [((0,), -1)])
    assert (t2p1 + minus1) == qpoly(("t",), [((2,), 1)])


def test_difference_of_squares():
    x = MultiPoly.variable(QQ, ("x", "y"), "x")
    y = MultiPoly.variable(QQ, ("x", "y"), "y")
    assert (x + y) * (x - y) == x * x - y * y


def test_f5_product():
    # (2t)(3t) = 6 t^2 = t^2 over F_5, confirmed by the brute oracle
    f5 = GF(5)
    t = MultiPoly.variable(f5, ("t",), "t")
    a, b = t.scale(2), t.scale(3)
    prod = a * b
    assert prod == MultiPoly(f5, ("t",), [((2,), 1)])
    assert brute_mul(a, b) == {(2,): 1}


def test_ring_axioms_randomized():
    rng = random.Random(7)
    vars_ = ("x", "y")

    def rand_poly():
        return MultiPoly(QQ, vars_, [((rng.randint(0, 3), rng.randint(0, 3)),
                                      Fraction(rng.randint(-5, 5)))
                                     for _ in range(4)])

    for _ in range(40):
        a, b, c = rand_poly(), rand_poly(), rand_poly()
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert dict(brute_mul(a, b)) == {e: c for e, c in (a * b).terms}


def test_canonical_form():
    p = MultiPoly(QQ, ("x", "y"), [((1, 1), Fraction(1)), ((2, 0), Fraction(1)),
                                   ((1, 1), Fraction(-1))])
    assert p.terms == (((2, 0), Fraction(1)),)
    # graded-lex descending: x^2 before xy before y
    q = MultiPoly(QQ, ("x", "y"), [((0, 1), Fraction(3)), ((2, 0), Fraction(1)),
                                   ((1, 1), Fraction(2))])
    assert [e for e, _ in q.terms] == [(2, 0), (1, 1), (0, 1)]


def test_mismatches_rejected():
    a = MultiPoly.variable(QQ, ("x",), "x")
    b = MultiPoly.variable(QQ, ("y",), "y")
    with pytest.raises(VariableMismatchError):
        _ = a + b
    c = MultiPoly.variable(GF(5), ("x",), "x")
    with pytest.raises(FieldMismatchError):
        _ = a + c


def test_evaluate_examples():
    t = MultiPoly.variable(QQ, ("t",), "t")
    one = MultiPoly.constant(QQ, ("t",), 1)
    p = t * t + one
    assert p.evaluate([Fraction(0)]) == 1
    xy = MultiPoly(QQ, ("x", "y"), [((2, 1), Fraction(1))])
    assert xy.evaluate([Fraction(2), Fraction(3)]) == 12
    # rational polynomial at a complex point (numeric backend)
    from pseudochart.exactpoly import CC
    assert abs(p.evaluate([1j], field=CC)) < 1e-12


def test_evaluate_arity_mismatch():
    p = MultiPoly.variable(QQ, ("x", "y"), "x")
    with pytest.raises(ValueError):
        p.evaluate([Fraction(1)])


def test_substitution_examples():
    s = MultiPoly.variable(QQ, ("s",), "s")
    t = MultiPoly.variable(QQ, ("t",), "t")
    one_t = MultiPoly.constant(QQ, ("t",), 1)
    assert (s * s).substitute({"s": t + one_t}) == (t + one_t) * (t + one_t)

    u = MultiPoly.variable(QQ, ("u", "v"), "u")
    v = MultiPoly.variable(QQ, ("u", "v"), "v")
    assert (u * v).substitute({"u": t * t, "v": t}) == t * t * t

    p = t * t + one_t
    expected = qpoly(("t",), [((4,), 1), ((2,), 2), ((0,), 2)])  # expand (t^2+1)^2 + 1
    assert p.substitute({"t": p}) == expected


def test_substitute_missing_variable():
    p = MultiPoly.variable(QQ, ("x", "y"), "x") * MultiPoly.variable(QQ, ("x", "y"), "y")
    with pytest.raises(VariableMismatchError):
        p.substitute({"x": MultiPoly.variable(QQ, ("t",), "t")})


def test_substitute_evaluate_commutation():
    rng = random.Random(11)
    vars_ = ("x", "y")
    for _ in range(30):
        p = MultiPoly(QQ, vars_, [((rng.randint(0, 2), rng.randint(0, 2)),
                                   Fraction(rng.randint(-4, 4))) for _ in range(3)])
        images = {v: MultiPoly(QQ, ("t",), [((rng.randint(0, 2),),
                                             Fraction(rng.randint(-3, 3)))
                                            for _ in range(2)])
                  for v in vars_}
        sub = p.substitute(images)
        for _ in range(5):
            x = Fraction(rng.randint(-5, 5))
            direct = sub.evaluate([x])
            via = p.evaluate([images["x"].evaluate([x]), images["y"].evaluate([x])])
            assert direct == via


def test_partial_derivative():
    x = MultiPoly.variable(QQ, ("x", "y", "z"), "x")
    y = MultiPoly.variable(QQ, ("x", "y", "z"), "y")
    z = MultiPoly.variable(QQ, ("x", "y", "z"), "z")
    fermat = x ** 3 + y ** 3 + z ** 3
    assert fermat.partial_derivative("x") == (x * x).scale(3)
    const = MultiPoly.constant(QQ, ("x", "y", "z"), 5)
    assert const.partial_derivative("x").is_zero
    assert (x * x * y).partial_derivative("y") == x * x
    # product rule on samples
    rng = random.Random(5)
    for _ in range(10):
        a = MultiPoly(QQ, ("x", "y", "z"),
                      [((rng.randint(0, 2),) * 3, Fraction(rng.randint(-3, 3)))])
        b = x + y.scale(rng.randint(1, 4))
        lhs = (a * b).partial_derivative("x")
        rhs = a.partial_derivative("x") * b + a * b.partial_derivative("x")
        assert lhs == rhs


def test_poly_arith_dispatch():
    x = MultiPoly.variable(QQ, ("x",), "x")
    assert poly_arith(x, x, "add") == x.scale(2)
    assert poly_arith(x, x, "sub").is_zero
    assert poly_arith(x, x, "mul") == x * x
    with pytest.raises(ValueError):
        poly_arith(x, x, "pow")


def test_json_round_trip_bit_exact():
    rng = random.Random(13)
    f = GF(7, 2)
    for field in (QQ, GF(11), f):
        for _ in range(10):
            if field == QQ:
                coeff = lambda: Fraction(rng.randint(-9, 9), rng.randint(1, 9))
            elif field == f:
                coeff = lambda: f.random_element(rng)
            else:
                coeff = lambda: rng.randrange(11)
            p = MultiPoly(field, ("x", "y"),
                          [((rng.randint(0, 4), rng.randint(0, 4)), coeff())
                           for _ in range(4)])
            blob = json.dumps(p.to_json(), sort_keys=True)
            q = poly_from_json(json.loads(blob))
            assert q == p
            assert json.dumps(q.to_json(), sort_keys=True) == blob
