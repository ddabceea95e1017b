"""Obstruction verdicts for affine surfaces.

A finite surjective polynomial chart from the affine plane onto a smooth
affine rational surface forces strong conditions on any smooth projective
compactification: the boundary must be a union of rational curves, there
must be at least as many of them as the Picard number, and their classes
must span the rational Picard group.  Violating any one of these yields
an OBSTRUCTED verdict; otherwise the verdict is INCONCLUSIVE -- never a
certificate that a chart exists.

For complements of plane curves the hypotheses reduce to concrete
computation: every curve of positive degree in the plane is ample, a
smooth plane curve of degree d has genus (d-1)(d-2)/2, and smoothness is
decided exactly by the Jacobian criterion (the three partial derivatives
have no common projective zero; in characteristic zero this already
forces the point onto the curve).  Positive genus of a smooth ample
boundary curve obstructs.  Singular boundary curves make the verdict
INCONCLUSIVE here: computing geometric genus of singular curves is out of
scope, and every OBSTRUCTED verdict must be fully certified.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .exactpoly import (
    EMPTY,
    GF,
    QQ,
    WITNESS,
    EliminationOutcome,
    Field,
    MultiPoly,
    certify_no_common_zero,
    poly_from_json,
)

CURVE_VARS = ("x", "y", "z")
EXACT_DEGREE_CAP = 4
PREFILTER_PRIMES = (101, 211)

OBSTRUCTED = "OBSTRUCTED"
INCONCLUSIVE = "INCONCLUSIVE"

NON_RATIONAL_BOUNDARY = "NON_RATIONAL_BOUNDARY"
TOO_FEW_COMPONENTS = "TOO_FEW_COMPONENTS"
CLASSES_DO_NOT_GENERATE = "CLASSES_DO_NOT_GENERATE"
POSITIVE_GENUS_AMPLE_CURVE = "POSITIVE_GENUS_AMPLE_CURVE"


class CurveParseError(ValueError):
    pass


class SingularCurveError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# plane curves


@dataclass
class PlaneCurve:
    """A nonzero homogeneous form in x, y, z over the rationals."""

    F: MultiPoly
    degree: int = 0

    def __post_init__(self):
        if self.F.vars != CURVE_VARS:
            raise CurveParseError(f"curve variables must be {CURVE_VARS}, got {self.F.vars}")
        if self.F.is_zero:
            raise CurveParseError("curve polynomial is zero")
        degrees = {sum(exp) for exp, _ in self.F.terms}
        if len(degrees) != 1:
            raise CurveParseError(f"curve polynomial is not homogeneous: degrees {sorted(degrees)}")
        d = degrees.pop()
        if d < 1:
            raise CurveParseError("curve degree must be >= 1")
        self.degree = d

    def to_json(self) -> dict:
        return {"polynomial": self.F.to_json(), "degree": self.degree}


def parse_curve(text: str) -> PlaneCurve:
    """Parse an inline curve expression: +, -, *, ^, integer coefficients,
    variables x, y, z.  Minimal by design; no parentheses."""
    poly = _parse_poly_expr(text)
    return PlaneCurve(poly)


def _parse_poly_expr(text: str) -> MultiPoly:
    s = text.replace(" ", "")
    if not s:
        raise CurveParseError("empty expression")
    # split into signed terms
    terms = []
    cur = ""
    for i, ch in enumerate(s):
        if ch in "+-" and i > 0 and s[i - 1] not in "+-*^":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    acc = MultiPoly.zero(QQ, CURVE_VARS)
    for term in terms:
        acc = acc + _parse_term(term)
    return acc


def _parse_term(term: str) -> MultiPoly:
    sign = 1
    while term and term[0] in "+-":
        if term[0] == "-":
            sign = -sign
        term = term[1:]
    if not term:
        raise CurveParseError("dangling sign")
    coeff = Fraction(sign)
    exps = {v: 0 for v in CURVE_VARS}
    for factor in term.split("*"):
        if not factor:
            raise CurveParseError(f"empty factor in {term!r}")
        if factor[0].isdigit():
            if not factor.isdigit():
                raise CurveParseError(f"bad integer coefficient {factor!r}")
            coeff *= int(factor)
            continue
        name = factor[0]
        if name not in CURVE_VARS:
            raise CurveParseError(f"unknown variable {name!r} (use x, y, z)")
        power = 1
        rest = factor[1:]
        if rest:
            if not rest.startswith("^") or not rest[1:].isdigit():
                raise CurveParseError(f"bad factor {factor!r}")
            power = int(rest[1:])
        exps[name] += power
    exp_vec = tuple(exps[v] for v in CURVE_VARS)
    return MultiPoly(QQ, CURVE_VARS, [(exp_vec, coeff)])


def curve_from_json(obj) -> PlaneCurve:
    if isinstance(obj, str):
        return parse_curve(obj)
    if "polynomial" in obj:
        return PlaneCurve(poly_from_json(obj["polynomial"]))
    return PlaneCurve(poly_from_json(obj))


# ---------------------------------------------------------------------------
# smoothness and genus


@dataclass
class SmoothnessReport:
    smooth: bool | None                # None = inconclusive
    witness: dict | None = None        # singular point description
    method: str = ""
    charts: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"smooth": self.smooth, "method": self.method}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def finite_field_singular_scan(C: PlaneCurve, p: int) -> tuple | None:
    """A projective point over F_p where all three partials vanish, if one
    exists (evidence only: reductions can create or hide singular points)."""
    fld = GF(p)
    try:
        partials = [C.F.partial_derivative(v).convert_field(fld) for v in CURVE_VARS]
    except ZeroDivisionError:
        return None
    reps = []
    for x in range(p):
        for y in range(p):
            reps.append((x, y, 1))
    for x in range(p):
        reps.append((x, 1, 0))
    reps.append((1, 0, 0))
    for pt in reps:
        if all(fld.is_zero(q.evaluate(pt)) for q in partials):
            return pt
    return None


def curve_smoothness(C: PlaneCurve) -> SmoothnessReport:
    """Jacobian criterion, exactly: the curve is smooth iff its three
    partial derivatives have no common projective zero.  Elimination per
    affine chart (z=1; z=0,y=1; z=0,y=0,x=1) for degree <= 4; a
    finite-field scan serves as a prefilter and as witness evidence for
    higher degrees."""
    prefilter = {p: finite_field_singular_scan(C, p) for p in PREFILTER_PRIMES}
    if C.degree > EXACT_DEGREE_CAP:
        hits = {p: pt for p, pt in prefilter.items() if pt is not None}
        if hits:
            p, pt = next(iter(hits.items()))
            return SmoothnessReport(None, {"field": f"GF({p})", "point": list(pt),
                                           "note": "modular evidence only"},
                                    method="finite_field_prefilter")
        raise BudgetExceeded(f"exact smoothness check capped at degree {EXACT_DEGREE_CAP}")
    partials = [C.F.partial_derivative(v) for v in CURVE_VARS]
    charts = {}
    # chart z=1
    outcomes = []
    for chart_name, sub in (("z=1", {"z": 1}), ("z=0,y=1", {"z": 0, "y": 1}),
                            ("z=0,y=0,x=1", {"z": 0, "y": 0, "x": 1})):
        vars_left = tuple(v for v in CURVE_VARS if v not in sub)
        if not vars_left:
            vals = {"x": Fraction(sub.get("x", 0)), "y": Fraction(sub.get("y", 0)),
                    "z": Fraction(sub.get("z", 0))}
            point = tuple(vals[v] for v in CURVE_VARS)
            if all(QQ.is_zero(q.evaluate(point)) for q in partials):
                charts[chart_name] = {"status": WITNESS}
                return SmoothnessReport(False, {"field": "QQ", "point": [str(v) for v in point]},
                                        method="direct", charts=charts)
            charts[chart_name] = {"status": EMPTY}
            continue
        mapping = {}
        for v in CURVE_VARS:
            if v in sub:
                mapping[v] = MultiPoly.constant(QQ, vars_left, sub[v])
            else:
                mapping[v] = MultiPoly.variable(QQ, vars_left, v)
        system = [q.substitute(mapping) for q in partials]
        live = [q for q in system if not q.is_zero]
        if not live:
            pt = _chart_point(sub, {v: Fraction(0) for v in vars_left})
            return SmoothnessReport(False, {"field": "QQ", "point": [str(v) for v in pt]},
                                    method="elimination", charts=charts)
        outcome = certify_no_common_zero(live)
        charts[chart_name] = outcome.to_json()
        outcomes.append((chart_name, sub, vars_left, outcome))
    for chart_name, sub, vars_left, outcome in outcomes:
        if outcome.status == WITNESS:
            values = dict(zip(vars_left, outcome.witness))
            pt = _chart_point(sub, values)
            return SmoothnessReport(
                False,
                {"field": repr(outcome.witness_field),
                 "point": [outcome.witness_field.element_str(v) if not isinstance(v, Fraction)
                           else str(v) for v in pt]},
                method="elimination", charts=charts)
    if all(o.status == EMPTY for _, _, _, o in outcomes):
        return SmoothnessReport(True, method="elimination", charts=charts)
    hits = {p: pt for p, pt in prefilter.items() if pt is not None}
    if hits:
        p, pt = next(iter(hits.items()))
        return SmoothnessReport(None, {"field": f"GF({p})", "point": list(pt),
                                       "note": "modular evidence only"},
                                method="finite_field_prefilter", charts=charts)
    raise BudgetExceeded("elimination inconclusive within the desk-scale budget")


def _chart_point(sub: dict, values: dict) -> tuple:
    out = []
    for v in CURVE_VARS:
        if v in sub:
            out.append(Fraction(sub[v]))
        else:
            out.append(values[v])
    return tuple(out)


def plane_curve_genus(C: PlaneCurve) -> int:
    """Genus of a smooth plane curve: (d-1)(d-2)/2.  Refused (with the
    witness) on singular input."""
    report = curve_smoothness(C)
    if report.smooth is not True:
        raise SingularCurveError(
            f"genus formula needs a smooth curve; smoothness check returned {report.smooth}",
            witness=report.witness)
    d = C.degree
    return (d - 1) * (d - 2) // 2


# ---------------------------------------------------------------------------
# surface models and verdicts


@dataclass
class BoundaryComponent:
    name: str
    genus: int = 0
    class_vector: tuple | None = None   # coordinates in a fixed Picard basis

    def to_json(self) -> dict:
        out = {"name": self.name, "genus": self.genus}
        if self.class_vector is not None:
            out["class"] = [str(v) for v in self.class_vector]
        return out


@dataclass
class SurfaceModel:
    """A compactified-surface description: Picard number and boundary
    components with genus tags and optional class vectors."""

    name: str
    picard_rank: int
    components: list[BoundaryComponent] = dc_field(default_factory=list)
    basis_note: str = ""

    def __post_init__(self):
        if self.picard_rank < 1:
            raise ValueError("Picard rank must be >= 1")
        for c in self.components:
            if c.class_vector is not None and len(c.class_vector) != self.picard_rank:
                raise ValueError(
                    f"class vector of {c.name!r} has length {len(c.class_vector)}, "
                    f"rank is {self.picard_rank}")

    def to_json(self) -> dict:
        return {"name": self.name, "picard_rank": self.picard_rank,
                "basis": self.basis_note,
                "boundary": [c.to_json() for c in self.components]}


def surface_from_json(obj: dict) -> SurfaceModel:
    comps = []
    for c in obj.get("boundary", []):
        vec = c.get("class")
        comps.append(BoundaryComponent(
            name=c.get("name", f"D{len(comps) + 1}"),
            genus=int(c.get("genus", 0)),
            class_vector=tuple(Fraction(v) for v in vec) if vec is not None else None))
    return SurfaceModel(obj["name"], int(obj["picard_rank"]), comps,
                        obj.get("basis", ""))


@dataclass
class Verdict:
    outcome: str
    reason: str | None = None
    witness: dict = dc_field(default_factory=dict)
    citation: str = ""
    notes: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        out = {"outcome": self.outcome, "citation": self.citation, "notes": self.notes}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.witness:
            out["witness"] = self.witness
        return out


def rank_over_q(rows: list[tuple]) -> int:
    """Exact rank of a rational matrix by Gaussian elimination."""
    m = [list(map(Fraction, row)) for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [v * inv for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def rank_mod_p(rows: list[tuple], p: int) -> int | None:
    """Rank of the reduction mod p; None if a denominator dies."""
    fld = GF(p)
    try:
        m = [[fld.convert(Fraction(v), QQ) for v in row] for row in rows]
    except ZeroDivisionError:
        return None
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] % p != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = fld.inv(m[rank][col])
        m[rank] = [(v * inv) % p for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] % p != 0:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def theorem_verdict(model: SurfaceModel) -> Verdict:
    """Obstruction test on a compactified-surface model: a finite
    surjective chart from the affine plane forces a rational boundary with
    at least picard_rank components whose classes span the rational
    Picard group; the first violated condition obstructs."""
    for c in model.components:
        if c.genus > 0:
            return Verdict(
                OBSTRUCTED, NON_RATIONAL_BOUNDARY,
                {"component": c.name, "genus": c.genus},
                citation=(f"boundary component {c.name!r} has genus {c.genus} > 0; a finite "
                          "surjective chart forces every boundary component to be rational"))
    s = len(model.components)
    if s < model.picard_rank:
        return Verdict(
            OBSTRUCTED, TOO_FEW_COMPONENTS,
            {"components": s, "picard_rank": model.picard_rank},
            citation=(f"only {s} boundary component(s) but Picard number "
                      f"{model.picard_rank}; a finite surjective chart forces at least "
                      "as many boundary components as the Picard number"))
    vectors = [c.class_vector for c in model.components if c.class_vector is not None]
    if vectors and len(vectors) == s:
        rank = rank_over_q(vectors)
        if rank < model.picard_rank:
            return Verdict(
                OBSTRUCTED, CLASSES_DO_NOT_GENERATE,
                {"rank": rank, "picard_rank": model.picard_rank,
                 "vectors": [[str(v) for v in vec] for vec in vectors]},
                citation=(f"boundary classes span a rank-{rank} subspace of the rank-"
                          f"{model.picard_rank} rational Picard group; a finite surjective "
                          "chart forces the boundary classes to span it"))
    return Verdict(
        INCONCLUSIVE,
        notes=["no obstruction found; this is not a certificate that a finite "
               "surjective chart exists"])


def corollary_verdict(C: PlaneCurve) -> Verdict:
    """Obstruction test for the plane minus a curve: a smooth curve of
    positive genus (degree >= 3; ample since every positive-degree plane
    curve is ample) obstructs."""
    try:
        report = curve_smoothness(C)
    except BudgetExceeded as exc:
        raise
    if report.smooth is True:
        g = (C.degree - 1) * (C.degree - 2) // 2
        if g > 0:
            return Verdict(
                OBSTRUCTED, POSITIVE_GENUS_AMPLE_CURVE,
                {"degree": C.degree, "genus": g},
                citation=(f"the boundary curve is smooth of degree {C.degree}, hence ample "
                          f"of genus {g} > 0; the complement admits no finite surjective "
                          "chart from the affine plane"))
        return Verdict(
            INCONCLUSIVE,
            witness={"degree": C.degree, "genus": g},
            notes=["smooth boundary curve of genus 0; no obstruction found, and no "
                   "existence certificate is implied"])
    if report.smooth is False:
        return Verdict(
            INCONCLUSIVE,
            witness={"singular_point": report.witness},
            notes=["SINGULAR_HYPOTHESIS_UNMET: the boundary curve is singular, so the "
                   "smooth-ample-curve criterion does not apply"])
    return Verdict(
        INCONCLUSIVE,
        witness={"smoothness": report.witness},
        notes=["smoothness undecided within budget"])


# ---------------------------------------------------------------------------
# catalog of standard rational surfaces


def catalog() -> list[SurfaceModel]:
    """Preset compactified-surface models with standard Picard bases and
    example boundary configurations."""
    models = [
        SurfaceModel("p2", 1, [], basis_note="basis: hyperplane class H"),
        SurfaceModel("p2_line", 1,
                     [BoundaryComponent("line", 0, (Fraction(1),))],
                     basis_note="basis: hyperplane class H"),
        SurfaceModel("p2_smooth_cubic", 1,
                     [BoundaryComponent("cubic", 1, (Fraction(3),))],
                     basis_note="basis: hyperplane class H"),
        SurfaceModel("p1xp1", 2, [], basis_note="basis: the two rulings f1, f2"),
        SurfaceModel("p1xp1_one_ruling", 2,
                     [BoundaryComponent("ruling", 0, (Fraction(1), Fraction(0)))],
                     basis_note="basis: the two rulings f1, f2"),
        SurfaceModel("p1xp1_two_rulings", 2,
                     [BoundaryComponent("ruling1", 0, (Fraction(1), Fraction(0))),
                      BoundaryComponent("ruling2", 0, (Fraction(0), Fraction(1)))],
                     basis_note="basis: the two rulings f1, f2"),
        SurfaceModel("p1xp1_rank_deficient", 2,
                     [BoundaryComponent("fiber_a", 0, (Fraction(1), Fraction(0))),
                      BoundaryComponent("fiber_b", 0, (Fraction(1), Fraction(0)))],
                     basis_note="basis: the two rulings f1, f2"),
        SurfaceModel("hirzebruch_2", 2, [],
                     basis_note="basis: fiber f, section s with s^2 = -2"),
        SurfaceModel("hirzebruch_2_fiber_only", 2,
                     [BoundaryComponent("fiber", 0, (Fraction(1), Fraction(0)))],
                     basis_note="basis: fiber f, section s with s^2 = -2"),
        SurfaceModel("hirzebruch_2_fiber_and_section", 2,
                     [BoundaryComponent("fiber", 0, (Fraction(1), Fraction(0))),
                      BoundaryComponent("section", 0, (Fraction(0), Fraction(1)))],
                     basis_note="basis: fiber f, section s with s^2 = -2"),
    ]
    for k in (1, 2, 3, 8):
        basis = "basis: pullback H, exceptional classes " + ", ".join(
            f"E{i+1}" for i in range(k))
        comps_full = [BoundaryComponent(
            "line", 0, tuple([Fraction(1)] + [Fraction(0)] * k))]
        for i in range(k):
            vec = [Fraction(0)] * (k + 1)
            vec[i + 1] = Fraction(1)
            comps_full.append(BoundaryComponent(f"E{i+1}", 0, tuple(vec)))
        models.append(SurfaceModel(f"blowup_{k}", k + 1, [], basis_note=basis))
        models.append(SurfaceModel(f"blowup_{k}_full_boundary", k + 1, comps_full,
                                   basis_note=basis))
        models.append(SurfaceModel(f"blowup_{k}_missing_one", k + 1, comps_full[:-1],
                                   basis_note=basis))
    return models


def catalog_model(name: str) -> SurfaceModel:
    for m in catalog():
        if m.name == name:
            return m
    raise KeyError(f"no catalog model named {name!r}")
