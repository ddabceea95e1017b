import json
import random
from fractions import Fraction

import pytest

from pseudochart.exactpoly import CC, GF, QQ, MultiPoly
from pseudochart.varspace import (
    BasePointHit,
    Factor,
    PolyMap,
    Space,
    SpaceMismatchError,
    SpacePoint,
    affine_space,
    compose,
    identity_map,
    map_from_json,
    point_from_json,
    product_map,
    product_space,
    projective_space,
    space_from_json,
)


def p1_cover_map():
    source = affine_space(1, names=("t",))
    target = projective_space(1)
    t = MultiPoly.variable(QQ, ("t",), "t")
    one = MultiPoly.constant(QQ, ("t",), 1)
    return PolyMap(source, target, [[t * t + one, t]], provenance="cover")


def test_space_validation():
    with pytest.raises(ValueError):
        Space((Factor("affine", 2, ("x",)),))          # wrong variable count
    with pytest.raises(ValueError):
        Space((Factor("affine", 1, ("x",)), Factor("affine", 1, ("x",))))  # duplicate
    with pytest.raises(ValueError):
        Factor("weird", 1, ("x",))
    sp = product_space(projective_space(1), affine_space(2))
    assert sp.dimension == 3
    assert sp.all_vars == ("x0", "x1", "t0", "t1")


def test_product_space_renames_deterministically():
    a = affine_space(1, names=("t",))
    sp = product_space(a, a, a)
    assert sp.all_vars == ("t", "t_2", "t_3")


def test_point_normalization():
    tgt = projective_space(1)
    p = SpacePoint(tgt, QQ, [(2, 1)])
    assert p.blocks == ((Fraction(1), Fraction(1, 2)),)
    q = SpacePoint(tgt, QQ, [(4, 2)])
    assert p == q
    with pytest.raises(ValueError):
        SpacePoint(tgt, QQ, [(0, 0)])


def test_evaluate_examples():
    h = p1_cover_map()
    src = h.source
    assert h.evaluate(SpacePoint(src, QQ, [(0,)])).blocks == ((Fraction(1), Fraction(0)),)
    assert h.evaluate(SpacePoint(src, QQ, [(1,)])).blocks == ((Fraction(1), Fraction(1, 2)),)
    ident = identity_map(projective_space(2), QQ)
    pt = SpacePoint(projective_space(2), QQ, [(3, 5, 7)])
    assert ident.evaluate(pt) == pt


def test_base_point_hit():
    src = affine_space(1, names=("t",))
    tgt = projective_space(1)
    t = MultiPoly.variable(QQ, ("t",), "t")
    bad = PolyMap(src, tgt, [[t * t, t]])
    with pytest.raises(BasePointHit) as exc:
        bad.evaluate(SpacePoint(src, QQ, [(0,)]))
    assert exc.value.witness.blocks == ((Fraction(0),),)


def test_projective_scaling_invariance():
    # scaling one projective source block leaves the image unchanged
    rng = random.Random(3)
    src = projective_space(1, names=("a", "b"))
    tgt = projective_space(2)
    a = MultiPoly.variable(QQ, ("a", "b"), "a")
    b = MultiPoly.variable(QQ, ("a", "b"), "b")
    veronese = PolyMap(src, tgt, [[a * a, a * b, b * b]])
    for _ in range(200):
        while True:
            x = [Fraction(rng.randint(-9, 9)) for _ in range(2)]
            if any(x):
                break
        lam = Fraction(rng.randint(1, 9))
        p1 = SpacePoint(src, QQ, [x])
        p2 = SpacePoint(src, QQ, [[lam * v for v in x]])
        assert veronese.evaluate(p1) == veronese.evaluate(p2)


def test_multihomogeneity_validation_rejects_corruption():
    src = projective_space(1, names=("a", "b"))
    tgt = projective_space(2)
    a = MultiPoly.variable(QQ, ("a", "b"), "a")
    b = MultiPoly.variable(QQ, ("a", "b"), "b")
    with pytest.raises(ValueError):
        PolyMap(src, tgt, [[a * a, a * b, b]])  # degree perturbed
    with pytest.raises(ValueError):
        PolyMap(src, tgt, [[a * a, a * b + b, b * b]])  # inhomogeneous component
    # affine target may not involve projective source variables
    with pytest.raises(ValueError):
        PolyMap(src, affine_space(2), [[a, b]])


def test_compose_with_identity():
    h = p1_cover_map()
    composed = compose(h, identity_map(h.target, QQ))
    assert composed.blocks == h.blocks


def test_compose_symmetric_square():
    h = p1_cover_map()
    src2 = projective_space(1, names=("a", "b"))
    tgt2 = projective_space(2)
    a = MultiPoly.variable(QQ, ("a", "b"), "a")
    b = MultiPoly.variable(QQ, ("a", "b"), "b")
    square = PolyMap(src2, tgt2, [[a * a, a * b, b * b]])
    comp = compose(h, square)
    t = MultiPoly.variable(QQ, ("t",), "t")
    one = MultiPoly.constant(QQ, ("t",), 1)
    f = t * t + one
    assert list(comp.blocks[0]) == [f * f, f * t, t * t]
    # evaluation commutes at t = 2: both routes give [25 : 10 : 4]
    x = SpacePoint(h.source, QQ, [(2,)])
    via = square.evaluate(h.evaluate(x))
    direct = comp.evaluate(x)
    assert via == direct
    assert direct.blocks == ((Fraction(1), Fraction(10, 25), Fraction(4, 25)),)


def test_compose_shape_mismatch():
    h = p1_cover_map()
    with pytest.raises(SpaceMismatchError):
        compose(h, h)


def test_compose_associativity_by_evaluation():
    rng = random.Random(5)
    h = p1_cover_map()
    src2 = projective_space(1, names=("a", "b"))
    a = MultiPoly.variable(QQ, ("a", "b"), "a")
    b = MultiPoly.variable(QQ, ("a", "b"), "b")
    square = PolyMap(src2, projective_space(2), [[a * a, a * b, b * b]])
    z = tuple(f"z{i}" for i in range(3))
    zsrc = projective_space(2, prefix="z")
    zvars = [MultiPoly.variable(QQ, z, n) for n in z]
    lin = PolyMap(zsrc, projective_space(2, prefix="w"),
                  [[zvars[0] + zvars[1], zvars[1] + zvars[2], zvars[0] + zvars[2]]])
    left = compose(compose(h, square), lin)
    right = compose(h, compose(square, lin))
    for _ in range(20):
        x = SpacePoint(h.source, QQ, [(Fraction(rng.randint(-9, 9)),)])
        assert left.evaluate(x) == right.evaluate(x)


def test_product_map_example():
    h = p1_cover_map()
    prod = product_map(h, identity_map(affine_space(1, names=("s",)), QQ))
    assert str(prod.source) == "A^1 x A^1"
    assert str(prod.target) == "P^1 x A^1"
    x = SpacePoint(prod.source, QQ, [(2,), (5,)])
    y = prod.evaluate(x)
    assert y.blocks == ((Fraction(1), Fraction(2, 5)), (Fraction(5),))
    ident2 = product_map(identity_map(affine_space(1, names=("u",)), QQ),
                         identity_map(affine_space(1, names=("v",)), QQ))
    pt = SpacePoint(ident2.source, QQ, [(1,), (2,)])
    assert ident2.evaluate(pt) == pt


def test_numeric_point_comparison():
    tgt = projective_space(1)
    p = SpacePoint(tgt, CC, [(2 + 0j, 1 + 0j)])
    q = SpacePoint(tgt, CC, [(2.0000000001 + 0j, 1 + 0j)])
    assert p.approx_equal(q)
    with pytest.raises(TypeError):
        hash(p)


def test_space_and_map_json_round_trip():
    h = p1_cover_map()
    blob = json.dumps(h.to_json(), sort_keys=True)
    back = map_from_json(json.loads(blob))
    assert back == h
    assert json.dumps(back.to_json(), sort_keys=True) == blob
    sp = product_space(projective_space(1), affine_space(2))
    assert space_from_json(sp.to_json()) == sp
    pt = SpacePoint(sp, GF(7), [(3, 1), (2, 5)])
    assert point_from_json(pt.to_json()) == pt
