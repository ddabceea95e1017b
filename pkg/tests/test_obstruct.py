import random
from fractions import Fraction

import pytest

from pseudochart.exactpoly import GF, QQ
from pseudochart.obstruct import (
    CLASSES_DO_NOT_GENERATE,
    INCONCLUSIVE,
    NON_RATIONAL_BOUNDARY,
    OBSTRUCTED,
    POSITIVE_GENUS_AMPLE_CURVE,
    TOO_FEW_COMPONENTS,
    BoundaryComponent,
    CurveParseError,
    SingularCurveError,
    SurfaceModel,
    catalog,
    catalog_model,
    corollary_verdict,
    curve_smoothness,
    finite_field_singular_scan,
    parse_curve,
    plane_curve_genus,
    rank_mod_p,
    rank_over_q,
    surface_from_json,
    theorem_verdict,
)

# curve corpus: (expression, smooth, degree); classifications are standard
# facts, re-checked below against an independent finite-field gradient scan
CURVE_CORPUS = [
    ("x", True, 1),
    ("y", True, 1),
    ("z", True, 1),
    ("x+y+z", True, 1),
    ("2*x-3*y+5*z", True, 1),
    ("x*z-y^2", True, 2),
    ("x^2+y^2-z^2", True, 2),
    ("x^2+y*z", True, 2),
    ("x^2+y^2+z^2", True, 2),
    ("x*y", False, 2),
    ("x^2", False, 2),
    ("x^2-y^2", False, 2),
    ("x^2+y^2", False, 2),
    ("x^3+y^3+z^3", True, 3),
    ("y^2*z-x^3-x*z^2", True, 3),
    ("y^2*z-x^3+x*z^2", True, 3),
    ("x^3+y^3+z^3-2*x*y*z", True, 3),
    ("y^2*z-x^3", False, 3),          # cusp at [0:0:1]
    ("y^2*z-x^3-x^2*z", False, 3),    # node at [0:0:1]
    ("x^3", False, 3),
    ("x*y*z", False, 3),
    ("x^2*z-x*y^2", False, 3),
    ("x^2*y", False, 3),
    ("x^3+y^2*z", False, 3),          # cusp
    ("x^4+y^4+z^4", True, 4),
    ("x^4+y^4-z^4", True, 4),
    ("x^4+y^4+z^4+x^2*y^2", True, 4),
    ("x^4+y^4+z^4+x^2*z^2", True, 4),
    ("x^2*z^2-2*x*y^2*z+y^4", False, 4),    # (xz - y^2)^2
    ("y^2*z^2-x^4", False, 4),
    ("x^4-y^4", False, 4),
    ("x^3*z-x^2*y^2", False, 4),
]


def test_corpus_is_large_enough():
    assert len(CURVE_CORPUS) >= 30
    assert all(d <= 4 for _, _, d in CURVE_CORPUS)


def test_parse_degrees():
    for expr, _, d in CURVE_CORPUS:
        assert parse_curve(expr).degree == d


def test_parser_rejects_garbage():
    for bad in ("", "x+", "w^2", "x^", "x*", "x^y", "3.5*x"):
        with pytest.raises(CurveParseError):
            parse_curve(bad)
    with pytest.raises(CurveParseError):
        parse_curve("x^2+y")  # inhomogeneous


def test_smoothness_corpus():
    for expr, smooth, _ in CURVE_CORPUS:
        rep = curve_smoothness(parse_curve(expr))
        assert rep.smooth is smooth, (expr, rep.smooth, rep.witness)
        if not smooth:
            assert rep.witness is not None


def test_smoothness_agrees_with_finite_field_scan():
    # no smooth corpus curve acquires a rational singular point mod the
    # prefilter primes
    for expr, smooth, _ in CURVE_CORPUS:
        if smooth:
            for p in (101, 211):
                assert finite_field_singular_scan(parse_curve(expr), p) is None, (expr, p)


def test_genus_values():
    assert plane_curve_genus(parse_curve("x")) == 0
    assert plane_curve_genus(parse_curve("x*z-y^2")) == 0
    assert plane_curve_genus(parse_curve("x^3+y^3+z^3")) == 1
    assert plane_curve_genus(parse_curve("x^4+y^4+z^4")) == 3


def test_genus_refused_on_singular():
    with pytest.raises(SingularCurveError) as exc:
        plane_curve_genus(parse_curve("y^2*z-x^3"))
    assert exc.value.witness is not None


def test_corollary_verdict_exactly_smooth_high_degree():
    for expr, smooth, d in CURVE_CORPUS:
        v = corollary_verdict(parse_curve(expr))
        if smooth and d >= 3:
            assert v.outcome == OBSTRUCTED and v.reason == POSITIVE_GENUS_AMPLE_CURVE, expr
        else:
            assert v.outcome == INCONCLUSIVE, expr
        if not smooth:
            assert any("SINGULAR_HYPOTHESIS_UNMET" in n for n in v.notes), expr


def test_corollary_named_cubics():
    assert corollary_verdict(parse_curve("x^3+y^3+z^3")).outcome == OBSTRUCTED
    nodal = corollary_verdict(parse_curve("y^2*z-x^3-x^2*z"))
    cuspidal = corollary_verdict(parse_curve("y^2*z-x^3"))
    assert nodal.outcome == INCONCLUSIVE and cuspidal.outcome == INCONCLUSIVE


def test_theorem_verdict_examples():
    v = theorem_verdict(catalog_model("p1xp1_one_ruling"))
    assert v.outcome == OBSTRUCTED and v.reason == TOO_FEW_COMPONENTS
    v = theorem_verdict(catalog_model("p1xp1_two_rulings"))
    assert v.outcome == INCONCLUSIVE
    assert any("not a certificate" in n for n in v.notes)
    v = theorem_verdict(catalog_model("p1xp1_rank_deficient"))
    assert v.outcome == OBSTRUCTED and v.reason == CLASSES_DO_NOT_GENERATE
    v = theorem_verdict(catalog_model("p2_smooth_cubic"))
    assert v.outcome == OBSTRUCTED and v.reason == NON_RATIONAL_BOUNDARY


def test_catalog_picard_ranks():
    by_name = {m.name: m for m in catalog()}
    assert by_name["p2"].picard_rank == 1
    assert by_name["p1xp1"].picard_rank == 2
    assert by_name["hirzebruch_2"].picard_rank == 2
    assert by_name["blowup_3"].picard_rank == 4
    assert by_name["blowup_8"].picard_rank == 9


def test_rank_exact_vs_mod_p():
    rng = random.Random(3)
    models = [m for m in catalog() if m.components
              and all(c.class_vector is not None for c in m.components)]
    assert models
    for m in models:
        rows = [c.class_vector for c in m.components]
        rq = rank_over_q(rows)
        for p in (101, 211, 401):
            assert rank_mod_p(rows, p) == rq, (m.name, p)


def test_monotone_on_rational_boundary_models():
    # dropping a boundary component never turns OBSTRUCTED into
    # INCONCLUSIVE when all components are rational
    models = [m for m in catalog() if m.components
              and all(c.genus == 0 for c in m.components)]
    for m in models:
        base = theorem_verdict(m)
        for drop in range(len(m.components)):
            reduced = SurfaceModel(m.name + "_reduced", m.picard_rank,
                                   [c for i, c in enumerate(m.components) if i != drop],
                                   m.basis_note)
            sub = theorem_verdict(reduced)
            if base.outcome == OBSTRUCTED:
                assert sub.outcome == OBSTRUCTED, (m.name, drop)


def test_surface_json_round_trip():
    m = catalog_model("p1xp1_two_rulings")
    back = surface_from_json(m.to_json())
    assert back.name == m.name and back.picard_rank == m.picard_rank
    assert [c.class_vector for c in back.components] == [c.class_vector for c in m.components]


def test_class_vector_length_validated():
    with pytest.raises(ValueError):
        SurfaceModel("bad", 2, [BoundaryComponent("c", 0, (Fraction(1),))])
