import json
import random
from fractions import Fraction

import pytest

from pseudochart.exactpoly import GF, QQ, MultiPoly
from pseudochart.varspace import PolyMap, SpacePoint, affine_space, projective_space
from pseudochart.atlasbuild import (
    Provenance,
    bundle_atlas,
    cover_p2,
    cover_pn,
    cover_product_p1,
    p1_double_cover,
    sym2_cover,
)
from pseudochart.chartverify import (
    POSITIVE_DIMENSIONAL,
    StructuredSolver,
    atlas_coverage_check,
    backend_agreement,
    brute_fiber,
    brute_image_table,
    check_no_base_points,
    degree_multiplicativity_check,
    fiber,
    fiber_nonempty_evidence,
    finite_fiber_scan,
    generic_degree,
    generic_fiber_status,
    image_membership,
    map_finite_fiber_scan,
    refute_surjectivity,
    surjectivity_scan,
    universal_nonempty,
    verify_chart,
)


# --- fibers ---------------------------------------------------------------

def test_p1_fiber_over_0_1():
    c = p1_double_cover()
    y = SpacePoint(c.map.target, QQ, [(0, 1)])
    rep = fiber(c, y)
    assert rep.closure_cardinality == 2
    imag = sorted(s[0].imag for s in rep.solutions)
    assert abs(imag[0] + 1) < 1e-9 and abs(imag[1] - 1) < 1e-9


def test_p1_fiber_over_1_0():
    c = p1_double_cover()
    y = SpacePoint(c.map.target, QQ, [(1, 0)])
    rep = fiber(c, y)
    assert rep.closure_cardinality == 1
    assert abs(rep.solutions[0][0]) < 1e-12


def test_tower_fiber_over_coordinate_point():
    t2 = cover_product_p1(2)
    y = SpacePoint(t2.map.target, QQ, [(1, 0), (1, 0)])
    rep = fiber(t2, y)
    assert rep.closure_cardinality == 1
    assert all(abs(v) < 1e-12 for v in rep.solutions[0])


def test_sym2_fiber_cardinalities():
    s = sym2_cover()
    prov = Provenance("sym2_cover", 2)
    solver = StructuredSolver(prov, s)
    # over [1:0:0]: the double factor, one point
    assert solver.count_exact(prov, ((Fraction(1), Fraction(0), Fraction(0)),), QQ) == 1
    stage = solver.points(prov, ((Fraction(1), Fraction(0), Fraction(0)),), QQ)
    assert len(stage.blocks_list) == 1
    pair = stage.blocks_list[0]
    assert pair[0] == pair[1] == (Fraction(0), Fraction(1))
    # over [1:0:-1]: the two orderings of the roots of t^2 - 1
    blocks = ((Fraction(1), Fraction(0), Fraction(-1)),)
    assert solver.count_exact(prov, blocks, QQ) == 2
    stage = solver.points(prov, blocks, QQ)
    pts = {tuple(p) for pair in stage.blocks_list for p in pair}
    assert pts == {(Fraction(1), Fraction(1)), (Fraction(-1), Fraction(1))}


def test_p2_fiber_over_random_rational_target():
    c = cover_p2()
    src = SpacePoint(c.map.source, QQ, [(Fraction(2), Fraction(3))])
    y = c.map.evaluate(src)
    rep = fiber(c, y)
    assert rep.closure_cardinality == 8
    assert len(rep.solutions) == 8


def test_brute_fiber_enumeration():
    t2 = cover_product_p1(2)
    # over ([3:1],[5:1]) in F_11: first disc is a residue, second is not
    y = SpacePoint(t2.map.target, GF(11), [(3, 1), (5, 1)])
    rep = fiber(t2, y, backend="brute", p=11)
    assert rep.backend == "brute_finite_field(11,1)"
    assert len(rep.solutions) == 0
    rep2 = fiber(t2, y)
    assert rep2.closure_cardinality == 4


def test_brute_fiber_sizes_over_f11():
    t2 = cover_product_p1(2)
    table = brute_image_table(t2.map, 11, 1)
    sizes = {len(v) for v in table.values()}
    assert sizes <= {1, 2, 4}
    # with unhit targets the full size profile is {0, 1, 2, 4}
    total_targets = 12 * 12
    assert len(table) < total_targets  # some targets have no rational point


def test_backend_agreement_small_prime():
    t2 = cover_product_p1(2)
    ag = backend_agreement(t2, 5)
    assert ag["agree"], ag["mismatches"]
    assert ag["targets"] == 36


def test_fiber_contains_source():
    for chart in (p1_double_cover(), cover_product_p1(2), cover_p2()):
        res = image_membership(chart, samples=15, seed=3)
        assert res["verdict"] == "PASS", res


# --- degrees ----------------------------------------------------------------

def test_generic_degrees():
    assert generic_degree(p1_double_cover(), samples=10, seed=0).inferred_degree == 2
    assert generic_degree(cover_product_p1(2), samples=12, seed=0).inferred_degree == 4
    assert generic_degree(cover_p2(), samples=12, seed=0).inferred_degree == 8


def test_generic_degree_rejects_small_samples():
    with pytest.raises(Exception):
        generic_degree(p1_double_cover(), samples=5, seed=0)


def test_degree_multiplicativity():
    t2 = cover_product_p1(2)
    res = degree_multiplicativity_check(t2, Provenance("sym2_cover", 2), sym2_cover(),
                                        samples=10, seed=0)
    assert res["multiplicative"]
    assert res["degree_f"] == 4 and res["degree_g"] == 2
    assert res["product"] == 8 == res["degree_composite"]


# --- surjectivity -----------------------------------------------------------

def test_p1_surjectivity_over_f101():
    c = p1_double_cover()
    f101 = GF(101)
    strata = [SpacePoint(c.map.target, f101, [(a, 1)]) for a in range(101)]
    strata.append(SpacePoint(c.map.target, f101, [(1, 0)]))
    cert = surjectivity_scan(c, strata)
    assert cert.verdict == "SURJECTIVE_ON_TESTED"
    assert cert.targets_tested == 102


def test_p2_surjectivity_on_coordinate_points():
    c = cover_p2()
    for coords in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
        y = SpacePoint(c.map.target, QQ, [coords])
        ok, ev = fiber_nonempty_evidence(c, y)
        assert ok, ev


def test_non_surjective_control_refuted():
    src = affine_space(1, names=("t",))
    tgt = projective_space(1)
    t = MultiPoly.variable(QQ, ("t",), "t")
    one = MultiPoly.constant(QQ, ("t",), 1)
    ctrl = PolyMap(src, tgt, [[t, one]])
    y = SpacePoint(tgt, QQ, [(1, 0)])
    ref = refute_surjectivity(ctrl, y)
    assert ref is not None
    assert ref["certificate"]["status"] == "EMPTY"


def test_universal_nonempty_certificates():
    for chart in (p1_double_cover(), cover_product_p1(3), cover_p2(), cover_pn(2, seed=7)):
        ok, reasons = universal_nonempty(chart.provenance)
        assert ok, reasons


# --- finite fibers ----------------------------------------------------------

def test_finite_fiber_scan_passes():
    res = finite_fiber_scan(p1_double_cover(), samples=10, seed=0)
    assert res["verdict"] == "PASS" and res["max_cardinality"] == 2
    res = finite_fiber_scan(cover_p2(), samples=10, seed=0)
    assert res["verdict"] == "PASS" and res["max_cardinality"] == 8


def test_positive_dimensional_control_fails():
    src = affine_space(2, names=("x", "y"))
    tgt = projective_space(1)
    x = MultiPoly.variable(QQ, ("x", "y"), "x")
    one = MultiPoly.constant(QQ, ("x", "y"), 1)
    proj = PolyMap(src, tgt, [[x, one]])
    res = map_finite_fiber_scan(proj, samples=4, seed=1)
    assert res["verdict"] == "FAIL"
    assert res["unconstrained"] == ["y"]
    y = SpacePoint(tgt, QQ, [(2, 1)])
    assert generic_fiber_status(proj, y)["status"] == POSITIVE_DIMENSIONAL


# --- base points -------------------------------------------------------------

def test_base_point_certificates():
    cert = check_no_base_points(p1_double_cover())
    assert cert.verdict == "CERTIFIED"
    blob = json.dumps(cert.to_json())
    assert "coprime_pair" in blob or "resultant" in blob
    for chart in (cover_product_p1(2), cover_p2(), cover_pn(2, seed=7)):
        assert check_no_base_points(chart).verdict == "CERTIFIED"


def test_base_point_witness_on_control():
    src = affine_space(1, names=("t",))
    tgt = projective_space(1)
    t = MultiPoly.variable(QQ, ("t",), "t")
    bad = PolyMap(src, tgt, [[t * t, t]])
    cert = check_no_base_points(bad)
    assert cert.verdict == "WITNESS"
    assert cert.witness == (Fraction(0),)


def test_verify_chart_pass_and_fail():
    rep = verify_chart(p1_double_cover(), samples=10, seed=0)
    assert rep["verdict"] == "PASS"
    # corrupt: zero a component to create a base point
    c = cover_p2()
    sv = c.map.source.all_vars
    zero = MultiPoly.zero(QQ, sv)
    broken_map = PolyMap(c.map.source, c.map.target,
                         [[zero, c.map.blocks[0][1], c.map.blocks[0][2]]])
    from pseudochart.atlasbuild import PseudoChart
    broken = PseudoChart(broken_map, 8, c.provenance)
    rep = verify_chart(broken, samples=10, seed=0)
    assert rep["verdict"] == "FAIL" and rep["failure"] == "BasePointHit"


# --- determinism and parallelism ---------------------------------------------

def test_reports_identical_across_thread_counts(monkeypatch):
    c = cover_p2()
    monkeypatch.setenv("PSEUDOCHART_THREADS", "1")
    rep1 = generic_degree(c, samples=12, seed=5)
    monkeypatch.setenv("PSEUDOCHART_THREADS", "4")
    rep4 = generic_degree(c, samples=12, seed=5)
    assert json.dumps(rep1.to_json(), sort_keys=True) == json.dumps(rep4.to_json(), sort_keys=True)


def test_identical_seeds_identical_reports():
    c = cover_product_p1(2)
    a = generic_degree(c, samples=10, seed=9).to_json()
    b = generic_degree(c, samples=10, seed=9).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


# --- atlas --------------------------------------------------------------------

def test_atlas_coverage():
    atlas = bundle_atlas(1, (0, 2), seed=3)
    res = atlas_coverage_check(atlas, samples=40, seed=1)
    assert res["verdict"] == "PASS" and res["covered"] == 40
