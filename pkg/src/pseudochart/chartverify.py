"""Evidence engine for charts: base-point certificates, surjectivity over
the algebraic closure, generic-degree measurement, finite-fiber scans.

Fibers of a constructed chart are solved structurally along its
provenance tree: the outermost stage's fiber is computed first, then each
inner stage's fiber over every intermediate point (quadratics and
eliminated univariates all the way down).  Two backends cross-check each
other:

* exact -- closure cardinalities from discriminant/degree analysis over
  the rationals or exhaustive extension-field scans (char-2 safe), never
  from floating point;
* numeric -- complex back-substitution with cluster merging and residual
  acceptance, used to list solutions and to measure degrees where exact
  counting does not reach.

Surjectivity over the closure is decided by symbolic nonemptiness, never
by hunting rational points: a fiber is nonempty over the closure iff its
eliminated polynomial chain is not a nonzero constant, and for the inner
stages of a composition this holds universally (the line cover's fiber
polynomial b*t^2 - a*t + b has the target coordinates among its top
coefficients, a nonzero binary quadratic form always splits, and a
projection with certified disjoint center restricts to a finite morphism
onto the target, which is closed and n-dimensional, hence everything).
"""

from __future__ import annotations

import cmath
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
import random

from .exactpoly import (
    CC,
    EMPTY,
    GF,
    INCONCLUSIVE,
    QQ,
    WITNESS,
    ExtensionField,
    Field,
    MultiPoly,
    PrimeField,
    RationalField,
    certify_no_common_zero,
    complex_roots_from_coeffs,
    finite_field_roots,
    search_witness,
    unconstrained_vars,
)
from .atlasbuild import (
    Provenance,
    PseudoChart,
    BundleAtlas,
    certify_projection_center,
    pullback_forms,
    rebuild_map,
    transport_chart_point,
)
from .varspace import (
    AFFINE,
    PROJECTIVE,
    BasePointHit,
    PolyMap,
    Space,
    SpacePoint,
)

NUMERIC_RESIDUAL = 1e-6
NUMERIC_MERGE = 1e-6
POSITIVE_DIMENSIONAL = "POSITIVE_DIMENSIONAL"

BRUTE_POINT_CAP = 10 ** 6


class VerificationError(Exception):
    pass


def _thread_count() -> int:
    raw = os.environ.get("PSEUDOCHART_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise VerificationError(f"PSEUDOCHART_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise VerificationError(f"PSEUDOCHART_THREADS must be a positive integer, got {raw!r}")
    return n


def _parallel_map(fn, items):
    """Deterministic parallel map: results ordered by input index."""
    workers = _thread_count()
    items = list(items)
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# report objects


@dataclass
class FiberReport:
    target: SpacePoint
    backend: str
    solutions: list
    multiplicities: list
    closure_cardinality: int | None
    positive_dimensional: bool = False
    notes: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        sols = []
        for s in self.solutions:
            if isinstance(s, SpacePoint) and s.field.exact:
                sols.append(s.to_json())
            else:
                sols.append({"numeric": repr(s)})
        return {
            "target": self.target.to_json() if self.target.field.exact else repr(self.target),
            "backend": self.backend,
            "solutions": sols,
            "multiplicities": list(self.multiplicities),
            "closure_cardinality": (POSITIVE_DIMENSIONAL if self.positive_dimensional
                                    else self.closure_cardinality),
            "notes": list(self.notes),
        }


@dataclass
class DegreeReport:
    samples: int
    cardinalities: list
    inferred_degree: int
    attainment: float
    non_generic: bool
    seed: int
    backend: str

    def to_json(self) -> dict:
        out = {
            "samples": self.samples,
            "cardinalities": list(self.cardinalities),
            "inferred_degree": self.inferred_degree,
            "attainment": round(self.attainment, 4),
            "seed": self.seed,
            "backend": self.backend,
        }
        if self.non_generic:
            out["flag"] = "NON_GENERIC_SAMPLING"
        return out


@dataclass
class SurjectivityCertificate:
    verdict: str                      # SURJECTIVE_ON_TESTED or NOT_SURJECTIVE
    targets_tested: int
    evidence: list
    witness: SpacePoint | None = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "targets_tested": self.targets_tested,
               "evidence": self.evidence}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


@dataclass
class BasePointCertificate:
    verdict: str                      # CERTIFIED / WITNESS / INCONCLUSIVE_BUDGET
    kind: str                         # elimination / structural
    data: dict
    witness: tuple | None = None
    witness_field: Field | None = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "kind": self.kind, "data": self.data}
        if self.witness is not None:
            out["witness"] = [self.witness_field.element_str(v) for v in self.witness]
            out["witness_field"] = self.witness_field.to_json()
        return out


# ---------------------------------------------------------------------------
# small exact helpers


def _fraction_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    ns = math.isqrt(x.numerator)
    ds = math.isqrt(x.denominator)
    if ns * ns == x.numerator and ds * ds == x.denominator:
        return Fraction(ns, ds)
    return None


def _p1_fiber_poly_coeffs(a, b, field: Field):
    """Coefficients (little-endian) of the line cover's fiber polynomial
    b*t^2 - a*t + b over the target [a:b]."""
    return [b, field.neg(a), b]


def _p1_count_exact(a, b, field: Field) -> int:
    """Distinct closure points of the line-cover fiber over [a:b]."""
    if field.is_zero(b):
        return 1
    if isinstance(field, RationalField):
        disc = a * a - 4 * b * b
        return 1 if disc == 0 else 2
    # finite field: count distinct roots in the splitting extension
    roots = _p1_roots_finite(a, b, field)
    return len(roots[0])


def _p1_roots_finite(a, b, field: Field):
    """(distinct roots, field scanned) of b*t^2 - a*t + b over a finite field."""
    base_k = field.k if isinstance(field, ExtensionField) else 1
    if field.is_zero(b):
        scan = field
    else:
        scan = GF(field.p, 2 * base_k)
    coeffs = _p1_fiber_poly_coeffs(a, b, field)
    poly = MultiPoly(scan, ("t",), [((i,), scan.convert(c, field))
                                    for i, c in enumerate(coeffs)])
    found = finite_field_roots(poly)
    return [r for r, _ in found], scan


def _p1_roots_numeric(a: complex, b: complex):
    coeffs = [b, -a, b]
    return complex_roots_from_coeffs(coeffs, merge=NUMERIC_MERGE)


P1_SPECIAL_TARGETS = ((Fraction(1), Fraction(0)), (Fraction(1), Fraction(2)),
                      (Fraction(-1), Fraction(2)))
# [1:0] has a linear fiber polynomial; [a:b] with a^2 = 4b^2, i.e. the
# normalized points [1:2] and [-1:2], has a vanishing discriminant.  All
# targets with a fiber of fewer than 2 closure points are among these.


def _sym2_root_points(A, B, C, field: Field):
    """Roots of the binary form A*s^2 - B*s*t + C*t^2 as points of the
    projective line.  Returns (points, exact, double) where points are
    coordinate pairs over `field` (exact) or complex pairs (inexact)."""
    if isinstance(field, RationalField):
        if A != 0:
            disc = B * B - 4 * A * C
            if disc == 0:
                return [(B / (2 * A), Fraction(1))] * 2, True, True
            root = _fraction_sqrt(disc)
            if root is not None:
                return ([((B + root) / (2 * A), Fraction(1)),
                         ((B - root) / (2 * A), Fraction(1))], True, False)
            sq = cmath.sqrt(complex(disc))
            return ([((complex(B) + sq) / complex(2 * A), 1 + 0j),
                     ((complex(B) - sq) / complex(2 * A), 1 + 0j)], False, False)
        if B != 0:
            return [(Fraction(1), Fraction(0)), (C / B, Fraction(1))], True, False
        return [(Fraction(1), Fraction(0))] * 2, True, True
    # finite field: exhaustive scan of the splitting extension
    base_k = field.k if isinstance(field, ExtensionField) else 1
    scan = GF(field.p, 2 * base_k) if not field.is_zero(A) else field
    Av, Bv, Cv = (scan.convert(v, field) for v in (A, B, C))
    reps = [(scan.one(), s) for s in scan.elements()] + [(scan.zero(), scan.one())]
    pts = []
    for s, t in reps:
        val = scan.sub(scan.add(scan.mul(Av, scan.mul(s, s)), scan.mul(Cv, scan.mul(t, t))),
                       scan.mul(Bv, scan.mul(s, t)))
        if scan.is_zero(val):
            pts.append((s, t))
    if len(pts) == 1:
        return [pts[0]] * 2, True, True
    return pts, True, False


# ---------------------------------------------------------------------------
# structured fiber solving


class ExactCountUnavailable(Exception):
    pass


OPAQUE = object()  # placeholder for affine identity coordinates whose
                   # value cannot influence a closure count


@dataclass
class _Stage:
    """Fiber of one provenance node over one target: listed source points
    (per-factor value blocks), their multiplicities, and notes."""
    blocks_list: list
    multiplicities: list
    notes: list = dc_field(default_factory=list)


def _extend_layout(prov: Provenance):
    """(prefix_factor_count, suffix_factor_count, child) of an extension node."""
    if prov.param("layout") == "tower":
        i = prov.param("position")
        n = prov.param("n")
        return i, (1 if n - i - 1 >= 1 else 0), prov.children[0]
    prefix = len(prov.param("prefix_factors", ()))
    suffix = len(prov.param("suffix_factors", ()))
    return prefix, suffix, prov.children[0]


class StructuredSolver:
    """Walks a provenance tree computing fibers over a target point."""

    def __init__(self, prov: Provenance, chart_map: PolyMap):
        self.prov = prov
        self.map = chart_map
        self._map_cache: dict[int, PolyMap] = {}

    # -- map rebuilding (for intermediate spaces and residual checks)

    def node_map(self, prov: Provenance) -> PolyMap:
        key = id(prov)
        if key not in self._map_cache:
            self._map_cache[key] = rebuild_map(prov)
        return self._map_cache[key]

    # -- exact closure counting

    def count_exact(self, prov: Provenance, blocks, field: Field) -> int:
        """Distinct closure points of the fiber of `prov` over the target
        with the given per-factor blocks.  Affine identity blocks may hold
        OPAQUE values; raises ExactCountUnavailable where the pattern
        machinery does not reach."""
        kind = prov.kind
        if kind == "p1_double_cover":
            a, b = blocks[0]
            if a is OPAQUE or b is OPAQUE:
                raise ExactCountUnavailable("opaque projective block")
            return _p1_count_exact(a, b, field)
        if kind == "identity":
            return 1
        if kind == "extend_over_base":
            n_pre, n_suf, child = _extend_layout(prov)
            mid = blocks[n_pre:len(blocks) - n_suf] if n_suf else blocks[n_pre:]
            return self.count_exact(child, mid, field)
        if kind == "sym2_cover":
            A, B, C = blocks[0]
            pts, exact, double = _sym2_root_points(A, B, C, field)
            return 1 if double else 2
        if kind == "segre_projection":
            # rational points found by a scan do not exhaust the closure
            raise ExactCountUnavailable("projection fibers are counted numerically")
        if kind == "compose":
            return self._count_compose(list(prov.children), blocks, field)
        raise ExactCountUnavailable(f"unhandled node {kind}")

    def _count_compose(self, children: list[Provenance], blocks, field: Field) -> int:
        if len(children) == 1:
            return self.count_exact(children[0], blocks, field)
        outer = children[-1]
        prefix = children[:-1]
        if outer.kind == "extend_over_base":
            n_pre, n_suf, child = _extend_layout(outer)
            mid = blocks[n_pre:len(blocks) - n_suf] if n_suf else blocks[n_pre:]
            if child.kind != "p1_double_cover":
                raise ExactCountUnavailable("non-line cover inside a tower step")
            a, b = mid[0]
            if a is OPAQUE or b is OPAQUE:
                raise ExactCountUnavailable("opaque projective block")
            c_here = _p1_count_exact(a, b, field)
            # the covered coordinate becomes an opaque affine value in the
            # outer source; identity blocks pass through unchanged
            src_blocks = self._extend_source_blocks(outer, blocks, (OPAQUE,))
            return c_here * self._count_compose(prefix, src_blocks, field)
        if outer.kind == "sym2_cover":
            A, B, C = blocks[0]
            pts, exact, double = _sym2_root_points(A, B, C, field)
            if exact:
                pairs = [(pts[0], pts[1])] if double else [(pts[0], pts[1]), (pts[1], pts[0])]
                return sum(self._count_compose(prefix, (p, q), field) for p, q in pairs)
            # conjugate irrational roots: neither can equal a rational
            # special target, so every inner line fiber has its full 2
            # points, and the two orderings are distinct
            return 2 * self._generic_inner_count(prefix)
        if outer.kind == "segre_projection":
            raise ExactCountUnavailable("projection fibers are counted numerically")
        raise ExactCountUnavailable(f"unhandled outer node {outer.kind}")

    def _generic_inner_count(self, children: list[Provenance]) -> int:
        out = 1
        for c in children:
            out *= c.leaf_degree_product()
        return out

    def _extend_source_blocks(self, prov: Provenance, target_blocks, covered_src_block):
        """Source blocks of an extension node's fiber point: identity
        blocks copied from the target, the covered block replaced."""
        n_pre, n_suf, _child = _extend_layout(prov)
        pre = list(target_blocks[:n_pre])
        suf = list(target_blocks[len(target_blocks) - n_suf:]) if n_suf else []
        if prov.param("layout") == "tower":
            # source affine factor merges the covered coordinate with the
            # remaining affine coordinates
            tail = tuple(suf[0]) if suf else ()
            return tuple(pre + [tuple(covered_src_block) + tail])
        return tuple(pre + [tuple(covered_src_block)] + suf)

    # -- numeric (and finite-field) point listing

    def points(self, prov: Provenance, blocks, field: Field) -> _Stage:
        """Fiber points of `prov` over the target blocks.  Exact fields
        produce exact points (extension scans); the rational field routes
        through complex numerics."""
        kind = prov.kind
        if kind == "p1_double_cover":
            return self._points_p1(blocks, field)
        if kind == "identity":
            return _Stage([tuple(tuple(b) for b in blocks)], [1])
        if kind == "extend_over_base":
            n_pre, n_suf, child = _extend_layout(prov)
            mid = blocks[n_pre:len(blocks) - n_suf] if n_suf else blocks[n_pre:]
            inner = self.points(child, mid, field)
            out, mults = [], []
            for src, m in zip(inner.blocks_list, inner.multiplicities):
                flat_child = tuple(v for blk in src for v in blk)
                out.append(self._extend_source_blocks(prov, blocks, flat_child))
                mults.append(m)
            return _Stage(out, mults, inner.notes)
        if kind == "sym2_cover":
            return self._points_sym2(blocks, field)
        if kind == "segre_projection":
            if isinstance(field, (PrimeField, ExtensionField)):
                pts = self._segre_projection_fiber_finite(prov, blocks, field)
                return _Stage([(p_blk) for p_blk in pts], [1] * len(pts))
            return self._points_segre_projection_numeric(prov, blocks)
        if kind == "compose":
            return self._points_compose(list(prov.children), blocks, field)
        raise VerificationError(f"unhandled node {kind}")

    def _points_p1(self, blocks, field: Field) -> _Stage:
        a, b = blocks[0]
        if isinstance(field, RationalField):
            if b == 0:
                return _Stage([((Fraction(0),),)], [1])
            disc = a * a - 4 * b * b
            if disc == 0:
                return _Stage([((a / (2 * b),),)], [2], ["double root"])
            root = _fraction_sqrt(disc)
            if root is not None:
                return _Stage([(((a + root) / (2 * b),),), (((a - root) / (2 * b),),)], [1, 1])
            roots = _p1_roots_numeric(complex(a), complex(b))
            return _Stage([((r,),) for r, _ in roots], [m for _, m in roots],
                          ["irrational roots listed numerically"])
        if isinstance(field, (PrimeField, ExtensionField)):
            roots, scan = _p1_roots_finite(a, b, field)
            mult = 2 if (not field.is_zero(b) and len(roots) == 1) else 1
            return _Stage([((r,),) for r in roots], [mult] * len(roots))
        # numeric backend
        roots = _p1_roots_numeric(complex(a), complex(b))
        return _Stage([((r,),) for r, _ in roots], [m for _, m in roots])

    def _points_sym2(self, blocks, field: Field) -> _Stage:
        A, B, C = blocks[0]
        if not field.exact:
            A, B, C = complex(A), complex(B), complex(C)
            scale = max(abs(A), abs(B), abs(C))
            if abs(A) > 1e-10 * scale:
                sq = cmath.sqrt(B * B - 4 * A * C)
                p = ((B + sq) / (2 * A), 1 + 0j)
                q = ((B - sq) / (2 * A), 1 + 0j)
                double = abs(p[0] - q[0]) < NUMERIC_MERGE * max(1.0, abs(p[0]))
            elif abs(B) > 1e-10 * scale:
                p, q, double = (1 + 0j, 0j), (C / B, 1 + 0j), False
            else:
                p = q = (1 + 0j, 0j)
                double = True
        else:
            pts, exact, double = _sym2_root_points(A, B, C, field)
            p, q = pts[0], pts[1]
            if not exact:
                double = False
        if double:
            return _Stage([(p, p)], [2], ["double factor"])
        return _Stage([(p, q), (q, p)], [1, 1])

    def _points_compose(self, children: list[Provenance], blocks, field: Field) -> _Stage:
        if len(children) == 1:
            return self.points(children[0], blocks, field)
        outer = children[-1]
        prefix = children[:-1]
        outer_stage = self.points(outer, blocks, field)
        outer_map = self.node_map(outer)
        out, mults, notes = [], [], list(outer_stage.notes)
        for src_blocks, m in zip(outer_stage.blocks_list, outer_stage.multiplicities):
            inner_field = field
            inner_blocks = src_blocks
            if field.exact and isinstance(field, RationalField) and _blocks_numeric(src_blocks):
                inner_field = CC
            if isinstance(field, (PrimeField, ExtensionField)):
                inner_field = _field_of_blocks(src_blocks, field)
                inner_blocks = _convert_blocks(src_blocks, inner_field)
            grouped = _group_blocks(outer_map.source, inner_blocks)
            inner_stage = self._points_compose(prefix, grouped, inner_field)
            for s, im in zip(inner_stage.blocks_list, inner_stage.multiplicities):
                out.append(s)
                mults.append(im * m)
            notes.extend(n for n in inner_stage.notes if n not in notes)
        return _Stage(out, mults, notes)

    # -- fused embedding-plus-projection fibers

    def _segre_projection_systems(self, prov: Provenance, blocks, field: Field):
        n = prov.param("n")
        coeffs = [list(r) for r in prov.param("coeffs")]
        forms = pullback_forms(n, coeffs)
        y = list(blocks[0])
        pivot = next(i for i, v in enumerate(y) if not field.is_zero(v))
        systems = []
        for i in range(n + 1):
            if i == pivot:
                continue
            # D_i = L_i * y_pivot - L_pivot * y_i over the target's field
            li = forms[i].convert_field(field) if field != QQ else forms[i]
            lp = forms[pivot].convert_field(field) if field != QQ else forms[pivot]
            systems.append(li.scale(y[pivot]) - lp.scale(y[i]))
        return n, systems

    def _segre_projection_fiber_finite(self, prov: Provenance, blocks, field: Field):
        n, systems = self._segre_projection_systems(prov, blocks, field)
        order = field.p ** (field.k if isinstance(field, ExtensionField) else 1)
        if (order + 1) ** n > BRUTE_POINT_CAP:
            raise VerificationError("finite-field projection fiber scan exceeds the point cap")
        reps = [(field.one(), s) for s in field.elements()] + [(field.zero(), field.one())]
        found = []
        for combo in itertools.product(reps, repeat=n):
            flat = tuple(v for pair in combo for v in pair)
            if all(field.is_zero(s.evaluate(flat)) for s in systems):
                found.append(tuple(combo))
        return found

    def _points_segre_projection_numeric(self, prov: Provenance, blocks) -> _Stage:
        n, systems = self._segre_projection_systems(prov, blocks, QQ)
        chart_sols = []
        notes = []
        for choice_idx in range(2 ** n):
            choice = tuple((choice_idx >> (n - 1 - i)) & 1 for i in range(n))
            specialized = [_specialize_chart(s, n, choice) for s in systems]
            sols = _solve_multilinear_numeric(specialized, n, notes)
            for s in sols:
                # back to projective coordinates of the product of lines
                pt = []
                for i in range(n):
                    si = s[i]
                    pt.append((1 + 0j, si) if choice[i] == 0 else (si, 1 + 0j))
                chart_sols.append(tuple(pt))
        dedup = []
        for pt in chart_sols:
            norm = _normalize_numeric_blocks(pt)
            if not any(_blocks_close(norm, q) for q in dedup):
                dedup.append(norm)
        return _Stage(dedup, [1] * len(dedup), notes)


def _blocks_numeric(blocks) -> bool:
    return any(isinstance(v, complex) for blk in blocks for v in blk)


def _field_of_blocks(blocks, default: Field) -> Field:
    # pick the largest extension present among the values
    best = default
    for blk in blocks:
        for v in blk:
            if isinstance(v, tuple):
                k = len(v)
                bk = best.k if isinstance(best, ExtensionField) else 1
                if k > bk:
                    best = GF(default.p, k)
    return best


def _convert_blocks(blocks, field: Field):
    out = []
    for blk in blocks:
        row = []
        for v in blk:
            if isinstance(v, tuple) and isinstance(field, ExtensionField) and len(v) == field.k:
                row.append(v)
            elif isinstance(v, tuple):
                row.append(field.convert(v, GF(field.p, len(v))))
            else:
                row.append(field.convert(v, GF(field.p)))
        out.append(tuple(row))
    return tuple(out)


def _group_blocks(space: Space, flat_blocks):
    """Regroup a tuple of per-factor blocks to match another space's
    factor layout (same total coordinate count)."""
    flat = [v for blk in flat_blocks for v in blk]
    out = []
    pos = 0
    for f in space.factors:
        out.append(tuple(flat[pos:pos + f.n_coords]))
        pos += f.n_coords
    return tuple(out)


def _specialize_chart(form: MultiPoly, n: int, choice) -> MultiPoly:
    chart_vars = tuple(f"s{i}" for i in range(n))
    mapping = {}
    for i in range(n):
        si = MultiPoly.variable(form.field, chart_vars, f"s{i}")
        one = MultiPoly.constant(form.field, chart_vars, form.field.one())
        if choice[i] == 0:
            mapping[f"a{i}"] = one
            mapping[f"b{i}"] = si
        else:
            mapping[f"a{i}"] = si
            mapping[f"b{i}"] = one
    return form.substitute(mapping)


def _complex_univariate(poly: MultiPoly, fixed: dict, var: str):
    """Complex coefficient list of poly in `var` after fixing the other
    variables numerically."""
    deg = poly.degree_in(var)
    coeffs = [0j] * (deg + 1)
    vi = poly.vars.index(var)
    for exp, c in poly.terms:
        val = complex(Fraction(c)) if not isinstance(c, complex) else c
        for j, e in enumerate(exp):
            if j == vi or not e:
                continue
            val *= fixed[poly.vars[j]] ** e
        coeffs[exp[vi]] += val
    return coeffs


def _residual_ok(poly: MultiPoly, values: dict) -> bool:
    total = 0j
    scale = 0.0
    for exp, c in poly.terms:
        cv = complex(Fraction(c)) if not isinstance(c, complex) else c
        term = cv
        for j, e in enumerate(exp):
            if e:
                term *= values[poly.vars[j]] ** e
        total += term
        scale = max(scale, abs(cv))
    bound = NUMERIC_RESIDUAL * max(1.0, scale)
    mag = max([1.0] + [abs(v) for v in values.values()])
    return abs(total) <= bound * mag ** max(1, poly.total_degree)


def _solve_multilinear_numeric(systems: list[MultiPoly], n: int, notes: list):
    """Numeric solutions of n multilinear equations in n chart variables,
    via exact resultant elimination plus complex back-substitution."""
    from .exactpoly import resultant

    svars = [f"s{i}" for i in range(n)]
    live = [s for s in systems if not s.is_zero]
    if len(live) < len(systems):
        notes.append("degenerate chart system (identically zero equation)")
    if not live:
        return []
    if n == 1:
        coeffs = _complex_univariate(live[0], {}, "s0")
        try:
            roots = complex_roots_from_coeffs(coeffs)
        except Exception:
            return []
        out = []
        for r, _ in roots:
            values = {"s0": r}
            if all(_residual_ok(q, values) for q in live):
                out.append((r,))
        return out
    # eliminate down to s0
    def eliminate_chain(polys, var):
        outs = []
        for i in range(len(polys)):
            for j in range(i + 1, len(polys)):
                if polys[i].degree_in(var) > 0 and polys[j].degree_in(var) > 0:
                    r = resultant(polys[i], polys[j], var)
                    if not r.is_zero:
                        outs.append(r)
                elif polys[i].degree_in(var) == 0:
                    outs.append(polys[i])
                elif polys[j].degree_in(var) == 0:
                    outs.append(polys[j])
        return outs

    # levels[j] holds polynomials in s0..s_{n-1-j}; the last level is
    # univariate in s0
    levels = [live]
    for v in reversed(svars[1:]):
        nxt = eliminate_chain(levels[-1], v)
        nxt = [p for p in nxt if not p.is_constant]
        if not nxt:
            notes.append("elimination chain collapsed (empty chart fiber)")
            return []
        levels.append(nxt)
    coeffs = _complex_univariate(levels[-1][0], {}, "s0")
    try:
        roots0 = complex_roots_from_coeffs(coeffs)
    except Exception:
        return []
    stack = [{"s0": r0} for r0, _ in roots0]
    # back-substitute through the levels: s1 from the next-to-last level,
    # and so on up to the original system for the last variable
    for depth, v in enumerate(svars[1:], start=1):
        level_polys = levels[n - 1 - depth]
        new_stack = []
        for values in stack:
            for c in _numeric_candidates_for_var(level_polys, values, v):
                nv = dict(values)
                nv[v] = c
                new_stack.append(nv)
        stack = new_stack
    solutions = []
    for values in stack:
        if not all(_residual_ok(q, values) for q in live):
            continue
        # polish to full precision so chart-overlap duplicates merge exactly
        polished = _newton_polish(live, values, n)
        if polished is None:
            continue
        solutions.append(tuple(polished[f"s{i}"] for i in range(n)))
    # de-duplicate within the chart
    dedup = []
    for s in solutions:
        if not any(max(abs(a - b) for a, b in zip(s, q)) < NUMERIC_MERGE * 10
                   for q in dedup):
            dedup.append(s)
    return dedup


def _newton_polish(polys: list[MultiPoly], values: dict, n: int,
                   iters: int = 12) -> dict | None:
    """Newton iteration on the square multilinear system; returns polished
    values, or None if the iteration fails to settle."""
    svars = [f"s{i}" for i in range(n)]
    grads = [[p.partial_derivative(v) for v in svars] for p in polys[:n]]

    def eval_c(poly, vals):
        total = 0j
        for exp, c in poly.terms:
            term = complex(Fraction(c)) if not isinstance(c, complex) else c
            for j, e in enumerate(exp):
                if e:
                    term *= vals[poly.vars[j]] ** e
            total += term
        return total

    vals = dict(values)
    for _ in range(iters):
        F = [eval_c(p, vals) for p in polys[:n]]
        if max(abs(f) for f in F) < 1e-13:
            return vals
        J = [[eval_c(g, vals) for g in row] for row in grads]
        delta = _solve_linear_complex(J, [-f for f in F])
        if delta is None:
            return None
        step = 0.0
        for v, d in zip(svars, delta):
            vals[v] = vals[v] + d
            step = max(step, abs(d))
        if step < 1e-14:
            break
    F = [eval_c(p, vals) for p in polys[:n]]
    return vals if max(abs(f) for f in F) < 1e-9 else None


def _solve_linear_complex(J, rhs):
    n = len(J)
    a = [row[:] + [rhs[i]] for i, row in enumerate(J)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[piv][col]) < 1e-14:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col:
                f = a[r][col] / a[col][col]
                for cc in range(col, n + 1):
                    a[r][cc] -= f * a[col][cc]
    return [a[i][n] / a[i][i] for i in range(n)]


def _numeric_candidates_for_var(polys, fixed: dict, var: str):
    for p in polys:
        if p.degree_in(var) == 0:
            continue
        missing = [v for v in p.occurring_vars() if v != var and v not in fixed]
        if missing:
            continue
        coeffs = _complex_univariate(p, fixed, var)
        if max(abs(c) for c in coeffs) < 1e-12:
            continue
        try:
            roots = complex_roots_from_coeffs(coeffs)
        except Exception:
            continue
        if roots:
            return [r for r, _ in roots]
    return []


def _normalize_numeric_blocks(blocks):
    out = []
    for blk in blocks:
        m = max(abs(v) for v in blk)
        piv = next(v for v in blk if abs(v) > 1e-9 * max(1.0, m))
        out.append(tuple(v / piv for v in blk))
    return tuple(out)


def _blocks_close(a, b, tol=1e-6) -> bool:
    for blk_a, blk_b in zip(a, b):
        for x, y in zip(blk_a, blk_b):
            if abs(x - y) > tol * max(1.0, abs(x)):
                return False
    return True


# ---------------------------------------------------------------------------
# fiber computation (public)


def _target_blocks(y: SpacePoint):
    return tuple(tuple(blk) for blk in y.blocks)


def _complex_blocks(y: SpacePoint):
    return tuple(tuple(complex(Fraction(v)) if not isinstance(v, complex) else v
                       for v in blk) for blk in y.blocks)


def _source_point(chart_map: PolyMap, blocks, field: Field) -> SpacePoint:
    flat = [v for blk in blocks for v in blk]
    return SpacePoint(chart_map.source, field,
                      _group_blocks(chart_map.source, (tuple(flat),)))


def fiber(chart: PseudoChart, y: SpacePoint, backend: str = "structured",
          p: int | None = None, k: int = 1) -> FiberReport:
    """Fiber of a chart over a target point.

    Backends: ``structured`` (exact closure count where the provenance
    machinery reaches, numeric otherwise), ``structured_exact`` (fail
    rather than fall back), ``structured_numeric``, and ``brute`` (full
    enumeration of F_{p^k}^n source points).
    """
    if backend == "brute":
        if p is None:
            raise VerificationError("brute backend needs a prime p")
        return brute_fiber(chart.map, y, p, k)
    if not y.space.same_shape(chart.map.target):
        raise VerificationError(f"target point lives in {y.space}, chart target is {chart.map.target}")
    solver = StructuredSolver(chart.provenance, chart.map)
    notes: list[str] = []
    exact_count: int | None = None
    if backend in ("structured", "structured_exact") and y.field.exact:
        try:
            exact_count = solver.count_exact(chart.provenance, _target_blocks(y), y.field)
        except ExactCountUnavailable as exc:
            if backend == "structured_exact":
                raise VerificationError(f"exact counting unavailable: {exc}") from exc
            notes.append(f"exact count unavailable ({exc}); using numeric count")
    if isinstance(y.field, (PrimeField, ExtensionField)):
        stage = solver.points(chart.provenance, _target_blocks(y), y.field)
        pts, mults, pt_field = [], [], y.field
        for blk, m in zip(stage.blocks_list, stage.multiplicities):
            f = _field_of_blocks(blk, y.field)
            if isinstance(f, ExtensionField) and (not isinstance(pt_field, ExtensionField)
                                                  or f.k > pt_field.k):
                pt_field = f
        for blk, m in zip(stage.blocks_list, stage.multiplicities):
            conv = _convert_blocks(blk, pt_field) if isinstance(pt_field, ExtensionField) else blk
            pts.append(_source_point(chart.map, conv, pt_field))
            mults.append(m)
        notes.extend(stage.notes)
        count = exact_count if exact_count is not None else len(pts)
        tag = "structured_exact"
        return FiberReport(y, tag, pts, mults, count, notes=notes)
    # rational target: exact stage data where roots are rational, complex
    # back-substitution otherwise; listed solutions are uniformly numeric
    stage = solver.points(chart.provenance, _target_blocks(y), y.field)
    sols = [tuple(complex(v) for blk in blocks for v in blk)
            for blocks in stage.blocks_list]
    notes.extend(n for n in stage.notes if n not in notes)
    numeric_count = sum(1 for _ in sols)
    count = exact_count if exact_count is not None else numeric_count
    tag = "structured_exact" if exact_count is not None else "structured_numeric"
    if exact_count is not None and numeric_count != exact_count:
        mult_total = sum(stage.multiplicities)
        if mult_total != exact_count and numeric_count != exact_count:
            notes.append(f"numeric listing found {numeric_count} clusters vs exact count {exact_count}")
    return FiberReport(y, tag, sols, stage.multiplicities, count, notes=notes)


def brute_fiber(chart_map: PolyMap, y: SpacePoint, p: int, k: int = 1) -> FiberReport:
    """Exhaustive enumeration of all F_{p^k}^n source points."""
    field = GF(p, k) if k > 1 else GF(p)
    n = chart_map.source.dimension
    order = p ** k
    if order ** n > BRUTE_POINT_CAP:
        raise VerificationError(f"brute enumeration of {order ** n} points exceeds the cap")
    if y.field != field:
        y = SpacePoint(y.space, field,
                       [[field.convert(v, y.field) for v in blk] for blk in y.blocks])
    sols = []
    for combo in itertools.product(list(field.elements()), repeat=n):
        pt = _source_point(chart_map, (combo,), field)
        try:
            img = chart_map.evaluate(pt, field=field)
        except BasePointHit:
            continue
        if img == y:
            sols.append(pt)
    return FiberReport(y, f"brute_finite_field({p},{k})", sols, [1] * len(sols),
                       len(sols), notes=["closure count not computed by enumeration"])


def brute_image_table(chart_map: PolyMap, p: int, k: int = 1) -> dict:
    """target point -> list of source points, for every F_{p^k}^n source."""
    field = GF(p, k) if k > 1 else GF(p)
    n = chart_map.source.dimension
    order = p ** k
    if order ** n > BRUTE_POINT_CAP:
        raise VerificationError(f"brute enumeration of {order ** n} points exceeds the cap")
    table: dict = {}
    for combo in itertools.product(list(field.elements()), repeat=n):
        pt = _source_point(chart_map, (combo,), field)
        try:
            img = chart_map.evaluate(pt, field=field)
        except BasePointHit:
            continue
        table.setdefault(img.blocks, []).append(pt)
    return table


# ---------------------------------------------------------------------------
# positive-dimension detection and the generic fallback


def fiber_system(chart_map: PolyMap, y: SpacePoint) -> list[MultiPoly]:
    """Polynomial system cutting out the fiber of a map over a point:
    cross-products against the target coordinates on projective blocks,
    differences on affine blocks."""
    field = y.field
    sv = chart_map.source.all_vars
    system: list[MultiPoly] = []
    for blk, fac, yblk in zip(chart_map.blocks, chart_map.target.factors, y.blocks):
        comps = [c.convert_field(field) if c.field != field else c for c in blk]
        if fac.kind == PROJECTIVE:
            pivot = next(i for i, v in enumerate(yblk) if not field.is_zero(v))
            for i in range(len(yblk)):
                if i == pivot:
                    continue
                system.append(comps[i].scale(yblk[pivot]) - comps[pivot].scale(yblk[i]))
        else:
            for c, v in zip(comps, yblk):
                system.append(c - MultiPoly.constant(field, sv, v))
    return system


def generic_fiber_status(chart_map: PolyMap, y: SpacePoint) -> dict:
    """Provenance-free fiber analysis: positive-dimension detection and an
    emptiness/witness certificate from the elimination machinery."""
    system = fiber_system(chart_map, y)
    live = [s for s in system if not s.is_zero]
    if not live:
        return {"status": POSITIVE_DIMENSIONAL, "unconstrained": list(chart_map.source.all_vars)}
    outcome = certify_no_common_zero(live)
    if outcome.status == EMPTY:
        return {"status": EMPTY, "outcome": outcome}
    # an unconstrained variable makes any solution set positive-dimensional
    missing = unconstrained_vars(system)
    if missing:
        return {"status": POSITIVE_DIMENSIONAL, "unconstrained": missing}
    return {"status": outcome.status, "outcome": outcome}


# ---------------------------------------------------------------------------
# degree measurement


def _random_rational_source(chart: PseudoChart, rng: random.Random) -> SpacePoint:
    # wide range keeps the ramification locus (a proper closed subset)
    # improbable under integer sampling
    n = chart.map.source.dimension
    coords = [Fraction(rng.randint(-60, 60)) for _ in range(n)]
    return _source_point(chart.map, (tuple(coords),), QQ)


def _random_target(space: Space, rng: random.Random, field: Field = QQ) -> SpacePoint:
    blocks = []
    for f in space.factors:
        while True:
            blk = [field.from_int(rng.randint(-99, 99)) for _ in range(f.n_coords)]
            if f.kind == AFFINE or any(not field.is_zero(v) for v in blk):
                break
        blocks.append(blk)
    return SpacePoint(space, field, blocks)


def generic_degree(chart: PseudoChart, samples: int = 25, seed: int = 0,
                   backend: str = "structured") -> DegreeReport:
    """Measured generic degree: the maximum closure fiber cardinality over
    image targets of random sources plus independent random targets, with
    an 80%-attainment genericity check."""
    if samples < 10:
        raise VerificationError("samples must be >= 10")
    rng = random.Random(seed)
    targets = []
    n_image = (samples + 1) // 2
    for _ in range(n_image):
        src = _random_rational_source(chart, rng)
        targets.append(chart.map.evaluate(src))
    for _ in range(samples - n_image):
        targets.append(_random_target(chart.map.target, rng))
    reports = _parallel_map(lambda y: fiber(chart, y, backend=backend), targets)
    cards = [r.closure_cardinality for r in reports]
    if any(r.positive_dimensional for r in reports):
        raise VerificationError("positive-dimensional fiber during degree sampling")
    inferred = max(cards)
    attainment = sum(1 for c in cards if c == inferred) / len(cards)
    used = sorted({r.backend for r in reports})
    return DegreeReport(samples, cards, inferred, attainment,
                        non_generic=attainment < 0.8, seed=seed,
                        backend="+".join(used))


def map_generic_degree(prov: Provenance, m: PolyMap, samples: int = 12,
                       seed: int = 0) -> int:
    """Measured generic degree of a (not necessarily affine-source) map,
    via structured fibers over images of random source points."""
    rng = random.Random(seed)
    solver = StructuredSolver(prov, m)
    counts = []
    for _ in range(samples):
        src = _random_target(m.source, rng)
        y = m.evaluate(src)
        try:
            counts.append(solver.count_exact(prov, _target_blocks(y), y.field))
        except ExactCountUnavailable:
            stage = solver.points(prov, _target_blocks(y), y.field)
            counts.append(len(stage.blocks_list))
    return max(counts)


def degree_multiplicativity_check(f_chart: PseudoChart, g_prov: Provenance,
                                  g_map: PolyMap, samples: int = 12,
                                  seed: int = 0) -> dict:
    """Measured degree of g∘f vs the product of the measured degrees."""
    composed_prov = Provenance("compose",
                               f_chart.provenance.leaf_degree_product()
                               * g_prov.leaf_degree_product(),
                               children=(f_chart.provenance, g_prov))
    from .varspace import compose as _compose
    from .atlasbuild import _flatten_affine_source, rebuild_chart_map
    composed = PseudoChart(rebuild_chart_map(composed_prov),
                           composed_prov.leaf_degree_product(), composed_prov)
    deg_f = generic_degree(f_chart, samples=max(10, samples), seed=seed).inferred_degree
    deg_g = map_generic_degree(g_prov, g_map, samples=samples, seed=seed + 1)
    deg_fg = generic_degree(composed, samples=max(10, samples), seed=seed + 2).inferred_degree
    return {
        "degree_f": deg_f,
        "degree_g": deg_g,
        "product": deg_f * deg_g,
        "degree_composite": deg_fg,
        "multiplicative": deg_f * deg_g == deg_fg,
    }


# ---------------------------------------------------------------------------
# surjectivity over the closure


def universal_nonempty(prov: Provenance) -> tuple[bool, list[str]]:
    """Certificate that every fiber of the node is nonempty over the
    closure, for all targets at once."""
    kind = prov.kind
    if kind == "p1_double_cover":
        return True, ["line cover: the fiber polynomial b*t^2 - a*t + b has the target "
                      "coordinates among its coefficients, so it is never a nonzero constant"]
    if kind == "sym2_cover":
        return True, ["point-pair cover: a nonzero binary quadratic form always splits "
                      "over the closure"]
    if kind == "identity":
        return True, []
    if kind == "segre_projection":
        n = prov.param("n")
        coeffs = [list(r) for r in prov.param("coeffs")]
        cert = certify_projection_center(n, coeffs)
        if cert is None:
            return False, ["projection center certificate failed"]
        return True, [f"projection center certified disjoint from the embedded variety "
                      f"({2 ** n} charts): the restriction is finite and closed onto the "
                      f"{n}-dimensional target, hence surjective"]
    if kind in ("extend_over_base", "compose", "product"):
        reasons = []
        for c in prov.children:
            ok, rs = universal_nonempty(c)
            if not ok:
                return False, rs
            reasons.extend(r for r in rs if r not in reasons)
        return True, reasons
    return False, [f"no universal certificate for node {kind!r}"]


def fiber_nonempty_evidence(chart: PseudoChart, y: SpacePoint) -> tuple[bool, dict]:
    """Per-target symbolic nonemptiness: the outermost fiber polynomial at
    the concrete target is not a nonzero constant, and the inner stages
    are nonempty universally."""
    prov = chart.provenance
    field = y.field
    blocks = _target_blocks(y)
    chain: list = []

    def outer_evidence(node: Provenance, blks) -> bool:
        if node.kind == "p1_double_cover":
            a, b = blks[0]
            coeffs = _p1_fiber_poly_coeffs(a, b, field)
            degree = 2 if not field.is_zero(coeffs[2]) else (1 if not field.is_zero(coeffs[1]) else 0)
            nonconstant = degree >= 1
            chain.append({"stage": "p1_double_cover",
                          "fiber_poly": f"({field.element_str(b)})*t^2 - "
                                        f"({field.element_str(a)})*t + ({field.element_str(b)})",
                          "degree": degree, "nonconstant": nonconstant})
            return nonconstant
        if node.kind == "sym2_cover":
            A, B, C = blks[0]
            nonzero = not (field.is_zero(A) and field.is_zero(B) and field.is_zero(C))
            chain.append({"stage": "sym2_cover", "form_nonzero": nonzero})
            return nonzero
        if node.kind == "identity":
            return True
        if node.kind == "segre_projection":
            ok, reasons = universal_nonempty(node)
            chain.append({"stage": "segre_projection", "universal": ok, "reasons": reasons})
            return ok
        if node.kind == "extend_over_base":
            n_pre, n_suf, child = _extend_layout(node)
            mid = blks[n_pre:len(blks) - n_suf] if n_suf else blks[n_pre:]
            return outer_evidence(child, mid)
        if node.kind == "compose":
            outer = node.children[-1]
            if not outer_evidence(outer, blks):
                return False
            ok, reasons = universal_nonempty(
                Provenance("compose", 1, children=tuple(node.children[:-1])))
            chain.append({"stage": "inner_universal", "ok": ok, "reasons": reasons})
            return ok
        chain.append({"stage": node.kind, "note": "no structured criterion"})
        return False

    ok = outer_evidence(prov, blocks)
    return ok, {"target": repr(y), "chain": chain}


def default_strata(space: Space, rng: random.Random, hyperplane: int = 30,
                   general: int = 30, field: Field = QQ) -> list[SpacePoint]:
    """Coordinate points, random points on each coordinate hyperplane, and
    random general points of the target space."""
    targets: list[SpacePoint] = []
    coord_choices = []
    for f in space.factors:
        if f.kind == PROJECTIVE:
            coord_choices.append(list(range(f.n_coords)))
        else:
            coord_choices.append([None])
    combos = list(itertools.product(*coord_choices))[:64]
    for combo in combos:
        blocks = []
        for f, choice in zip(space.factors, combo):
            if choice is None:
                blocks.append([field.from_int(0)] * f.n_coords)
            else:
                blocks.append([field.from_int(1 if i == choice else 0)
                               for i in range(f.n_coords)])
        targets.append(SpacePoint(space, field, blocks))
    proj_factors = [(i, f) for i, f in enumerate(space.factors) if f.kind == PROJECTIVE]
    made = 0
    while made < hyperplane and proj_factors:
        fi, f = proj_factors[made % len(proj_factors)]
        zero_at = rng.randrange(f.n_coords)
        blocks = []
        for j, fac in enumerate(space.factors):
            while True:
                blk = [field.from_int(rng.randint(-9, 9)) for _ in range(fac.n_coords)]
                if j == fi:
                    blk[zero_at] = field.from_int(0)
                if fac.kind == AFFINE or any(not field.is_zero(v) for v in blk):
                    break
            blocks.append(blk)
        targets.append(SpacePoint(space, field, blocks))
        made += 1
    for _ in range(general):
        targets.append(_random_target(space, rng, field))
    return targets


def surjectivity_scan(chart: PseudoChart, strata: list[SpacePoint] | None = None,
                      seed: int = 0) -> SurjectivityCertificate:
    """Nonemptiness of the closure fiber at every tested target."""
    if strata is None:
        strata = default_strata(chart.map.target, random.Random(seed))
    results = _parallel_map(lambda y: fiber_nonempty_evidence(chart, y), strata)
    evidence = []
    for y, (ok, ev) in zip(strata, results):
        evidence.append(ev | {"nonempty": ok})
        if not ok:
            return SurjectivityCertificate("NOT_SURJECTIVE", len(strata), evidence, witness=y)
    return SurjectivityCertificate("SURJECTIVE_ON_TESTED", len(strata), evidence)


def refute_surjectivity(chart_map: PolyMap, y: SpacePoint) -> dict | None:
    """For control maps: a certificate that the fiber over y is empty over
    the closure (hence the map is not surjective), or None."""
    status = generic_fiber_status(chart_map, y)
    if status["status"] == EMPTY:
        return {"witness_target": repr(y),
                "certificate": status["outcome"].to_json()}
    return None


# ---------------------------------------------------------------------------
# finite-fiber scan


def finite_fiber_scan(chart: PseudoChart, samples: int = 20, seed: int = 0) -> dict:
    """No sampled fiber may be positive-dimensional; reports the maximum
    closure cardinality seen."""
    rng = random.Random(seed)
    targets = []
    for _ in range(samples // 2):
        targets.append(chart.map.evaluate(_random_rational_source(chart, rng)))
    for _ in range(samples - samples // 2):
        targets.append(_random_target(chart.map.target, rng))
    max_card = 0
    for y in targets:
        status = generic_fiber_status(chart.map, y)
        if status["status"] == POSITIVE_DIMENSIONAL:
            return {"verdict": "FAIL", "witness_target": repr(y),
                    "unconstrained": status.get("unconstrained", [])}
        rep = fiber(chart, y)
        if rep.positive_dimensional:
            return {"verdict": "FAIL", "witness_target": repr(y)}
        max_card = max(max_card, rep.closure_cardinality or 0)
    return {"verdict": "PASS", "samples": samples, "max_cardinality": max_card, "seed": seed}


def map_finite_fiber_scan(chart_map: PolyMap, samples: int = 10, seed: int = 0) -> dict:
    """Positive-dimension detection for arbitrary maps (control maps)."""
    rng = random.Random(seed)
    for _ in range(samples):
        n = chart_map.source.dimension
        coords = tuple(Fraction(rng.randint(-5, 5)) for _ in range(n))
        src = _source_point(chart_map, (coords,), QQ)
        y = chart_map.evaluate(src)
        status = generic_fiber_status(chart_map, y)
        if status["status"] == POSITIVE_DIMENSIONAL:
            return {"verdict": "FAIL", "witness_target": repr(y),
                    "unconstrained": status.get("unconstrained", [])}
    return {"verdict": "PASS", "samples": samples, "seed": seed}


# ---------------------------------------------------------------------------
# base points


def _source_charts(space: Space):
    """Dehomogenization charts of the source: per projective factor choose
    the coordinate set to 1; affine factors keep their variables."""
    choices = []
    for f in space.factors:
        choices.append(list(range(f.n_coords)) if f.kind == PROJECTIVE else [None])
    return list(itertools.product(*choices))


def _specialize_source_chart(comp: MultiPoly, space: Space, chart_choice) -> MultiPoly:
    mapping = {}
    keep_vars = []
    for f, choice in zip(space.factors, chart_choice):
        for i, v in enumerate(f.vars):
            if choice is not None and i == choice:
                continue
            keep_vars.append(v)
    keep_vars = tuple(keep_vars)
    field = comp.field
    for f, choice in zip(space.factors, chart_choice):
        for i, v in enumerate(f.vars):
            if choice is not None and i == choice:
                mapping[v] = MultiPoly.constant(field, keep_vars, field.one())
            else:
                mapping[v] = MultiPoly.variable(field, keep_vars, v)
    return comp.substitute(mapping)


def check_no_base_points(chart_or_map) -> BasePointCertificate:
    """Certify that no projective target block's components share a zero
    on the source (per dehomogenization chart of the source)."""
    if isinstance(chart_or_map, PseudoChart):
        m = chart_or_map.map
        prov = chart_or_map.provenance
    else:
        m, prov = chart_or_map, None
    proj = [(i, blk) for i, (blk, fac) in enumerate(zip(m.blocks, m.target.factors))
            if fac.kind == PROJECTIVE]
    if not proj:
        raise VerificationError("map has no projective target block")
    data: dict = {"blocks": {}}
    budget = False
    for bi, blk in proj:
        comps = [c for c in blk]
        for chart_idx, choice in enumerate(_source_charts(m.source)):
            system = [_specialize_source_chart(c, m.source, choice) for c in comps]
            live = [s for s in system if not s.is_zero]
            if not live:
                ws = search_witness(system)
                wit = ws if ws else ((tuple(Fraction(0) for _ in system[0].vars), QQ)
                                     if system else None)
                return BasePointCertificate("WITNESS", "elimination",
                                            data, wit[0], wit[1])
            outcome = certify_no_common_zero(live)
            key = f"block{bi}/chart{chart_idx}"
            data["blocks"][key] = outcome.to_json()
            if outcome.status == WITNESS:
                return BasePointCertificate("WITNESS", "elimination", data,
                                            outcome.witness, outcome.witness_field)
            if outcome.status != EMPTY:
                budget = True
    if not budget:
        return BasePointCertificate("CERTIFIED", "elimination", data)
    if prov is not None:
        ok, reasons = structural_base_point_certificate(prov)
        if ok:
            return BasePointCertificate("CERTIFIED", "structural",
                                        {"reasons": reasons, "partial": data})
    return BasePointCertificate("INCONCLUSIVE_BUDGET", "elimination", data)


def structural_base_point_certificate(prov: Provenance) -> tuple[bool, list[str]]:
    """A composition or product of everywhere-defined stages is everywhere
    defined; leaves are certified individually (tiny exact eliminations,
    plus the projection-center certificate)."""
    kind = prov.kind
    if kind == "p1_double_cover":
        from .atlasbuild import p1_double_cover
        cert = check_no_base_points(p1_double_cover().map)
        return cert.verdict == "CERTIFIED", ["line cover components share no zero"]
    if kind == "sym2_cover":
        from .atlasbuild import sym2_cover
        cert = check_no_base_points(sym2_cover())
        return cert.verdict == "CERTIFIED", ["point-pair cover components share no zero"]
    if kind == "identity":
        return True, []
    if kind == "segre_projection":
        ok, reasons = universal_nonempty(prov)
        return ok, (["embedding coordinates cannot all vanish; projection center "
                     "certified disjoint"] if ok else reasons)
    if kind in ("extend_over_base", "compose", "product"):
        reasons = []
        for c in prov.children:
            ok, rs = structural_base_point_certificate(c)
            if not ok:
                return False, rs
            reasons.extend(r for r in rs if r not in reasons)
        return True, reasons
    return False, [f"no structural certificate for {kind!r}"]


# ---------------------------------------------------------------------------
# verification suites


def verify_chart(chart: PseudoChart, samples: int = 25, seed: int = 0,
                 backend: str = "structured", brute_p: int | None = None,
                 brute_k: int = 1) -> dict:
    """Run base-point, surjectivity, finite-fiber, and degree suites.

    Returns a report dict with an overall ``verdict`` of PASS or FAIL
    (FAIL carries the witness); the CLI maps this onto exit codes.
    """
    report: dict = {"seed": seed, "samples": samples, "backend": backend,
                    "claimed_degree": chart.claimed_degree, "suites": {}}
    bp = check_no_base_points(chart)
    report["suites"]["base_points"] = bp.to_json()
    if bp.verdict == "WITNESS":
        report["verdict"] = "FAIL"
        report["failure"] = "BasePointHit"
        return report
    if bp.verdict != "CERTIFIED":
        report["verdict"] = "FAIL"
        report["failure"] = "INCONCLUSIVE_BUDGET"
        return report

    rng = random.Random(seed)
    strata = default_strata(chart.map.target, rng, hyperplane=10, general=10)
    surj = surjectivity_scan(chart, strata)
    report["suites"]["surjectivity"] = {"verdict": surj.verdict,
                                        "targets_tested": surj.targets_tested}
    if surj.verdict != "SURJECTIVE_ON_TESTED":
        report["verdict"] = "FAIL"
        report["failure"] = "NOT_SURJECTIVE"
        report["witness"] = surj.witness.to_json()
        return report

    fin = finite_fiber_scan(chart, samples=max(10, samples // 2), seed=seed)
    report["suites"]["finite_fibers"] = fin
    if fin["verdict"] != "PASS":
        report["verdict"] = "FAIL"
        report["failure"] = POSITIVE_DIMENSIONAL
        return report

    deg = generic_degree(chart, samples=samples, seed=seed, backend=backend)
    report["suites"]["degree"] = deg.to_json()
    if fin["max_cardinality"] > chart.claimed_degree:
        report["verdict"] = "FAIL"
        report["failure"] = "FIBER_EXCEEDS_CLAIMED_DEGREE"
        return report
    if deg.inferred_degree != chart.claimed_degree or deg.non_generic:
        report["verdict"] = "FAIL"
        report["failure"] = "DEGREE_MISMATCH"
        return report

    if brute_p is not None:
        agreement = backend_agreement(chart, brute_p)
        report["suites"]["backend_agreement"] = agreement
        if not agreement["agree"]:
            report["verdict"] = "FAIL"
            report["failure"] = "BACKEND_DISAGREEMENT"
            return report
        report["notes"] = [f"backend agreement: structured exact closure counts match "
                           f"exhaustive enumeration over F_{brute_p}^2 on all "
                           f"{agreement['targets']} targets"]
    report["verdict"] = "PASS"
    return report


def backend_agreement(chart: PseudoChart, p: int) -> dict:
    """Exhaustive cross-check: for every rational point of the target over
    F_p, the structured exact closure count equals the number of source
    points found by enumerating the quadratic-extension source."""
    field = GF(p)
    ext = GF(p, 2)
    table = brute_image_table(chart.map, p, 2)
    targets = _all_targets_over(chart.map.target, field)
    solver = StructuredSolver(chart.provenance, chart.map)
    mismatches = []
    for y in targets:
        want = solver.count_exact(chart.provenance, _target_blocks(y), field)
        y_ext = SpacePoint(y.space, ext, [[ext.convert(v, field) for v in blk]
                                          for blk in y.blocks])
        got = len(table.get(y_ext.blocks, []))
        if want != got:
            mismatches.append({"target": repr(y), "structured": want, "brute": got})
    return {"p": p, "targets": len(targets), "agree": not mismatches,
            "mismatches": mismatches[:10]}


def _all_targets_over(space: Space, field: Field) -> list[SpacePoint]:
    per_factor = []
    for f in space.factors:
        if f.kind == PROJECTIVE:
            reps = []
            for lead in range(f.n_coords):
                tail = itertools.product(list(field.elements()), repeat=f.n_coords - lead - 1)
                for t in tail:
                    reps.append((field.zero(),) * lead + (field.one(),) + tuple(t))
            per_factor.append(reps)
        else:
            per_factor.append(list(itertools.product(list(field.elements()), repeat=f.n_coords)))
    return [SpacePoint(space, field, list(combo))
            for combo in itertools.product(*per_factor)]


def verify_atlas(atlas: BundleAtlas, samples: int = 15, seed: int = 0,
                 coverage_samples: int = 200) -> dict:
    """Verify every chart of a bundle atlas and check that sampled bundle
    points are covered by at least one chart."""
    report: dict = {"seed": seed, "charts": [], "suites": {}}
    ok = True
    for i, chart in enumerate(atlas.charts):
        sub = verify_chart(chart, samples=max(10, samples), seed=seed + i)
        report["charts"].append(sub)
        ok = ok and sub["verdict"] == "PASS"
    coverage = atlas_coverage_check(atlas, coverage_samples, seed)
    report["suites"]["coverage"] = coverage
    ok = ok and coverage["verdict"] == "PASS"
    report["verdict"] = "PASS" if ok else "FAIL"
    return report


def atlas_coverage_check(atlas: BundleAtlas, samples: int = 200, seed: int = 0) -> dict:
    """Sample bundle points (a base point of projective n-space plus fiber
    coordinates in some chart's trivialization) and confirm each lies in
    the image of at least one chart, over the closure."""
    rng = random.Random(seed)
    n = atlas.base_dim
    r = len(atlas.splitting_degrees) - 1
    covered = 0
    failures = []
    for s in range(samples):
        while True:
            base = [Fraction(rng.randint(-9, 9)) for _ in range(n + 1)]
            if any(v != 0 for v in base):
                break
        while True:
            fiber_w = [Fraction(rng.randint(-9, 9)) for _ in range(r + 1)]
            if any(v != 0 for v in fiber_w):
                break
        home = next(i for i in range(n + 1) if base[i] != 0)
        home_base = tuple(base[l] / base[home] for l in range(n + 1) if l != home)
        point_covered = False
        for i in range(n + 1):
            if base[i] == 0:
                continue
            if i == home:
                b_i, w_i = home_base, tuple(fiber_w)
            else:
                try:
                    b_i, w_i = transport_chart_point(atlas, home, i, home_base, tuple(fiber_w))
                except ValueError:
                    continue
            chart = atlas.charts[i]
            target = SpacePoint(chart.map.target, QQ, [list(b_i), list(w_i)])
            ok, _ev = fiber_nonempty_evidence(chart, target)
            if ok:
                point_covered = True
                break
        if point_covered:
            covered += 1
        else:
            failures.append({"sample": s, "base": [str(v) for v in base]})
    return {"verdict": "PASS" if covered == samples else "FAIL",
            "covered": covered, "samples": samples, "seed": seed,
            "failures": failures[:5]}


def image_membership(chart: PseudoChart, samples: int = 100, seed: int = 0,
                     tol: float = 1e-6) -> dict:
    """For random sources x, the fiber over the image of x contains x
    (exactly over exact fields, within tolerance numerically)."""
    rng = random.Random(seed)
    failures = []
    for s in range(samples):
        x = _random_rational_source(chart, rng)
        y = chart.map.evaluate(x)
        rep = fiber(chart, y)
        xc = tuple(complex(v) for v in x.coords())
        found = False
        for sol in rep.solutions:
            coords = (tuple(complex(v) for blk in sol.blocks for v in blk)
                      if isinstance(sol, SpacePoint) else tuple(complex(v) for v in sol))
            if len(coords) == len(xc) and max(
                    abs(a - b) for a, b in zip(coords, xc)) <= tol * max(
                    1.0, max(abs(a) for a in xc)):
                found = True
                break
        if not found:
            failures.append({"sample": s, "source": repr(x)})
    return {"verdict": "PASS" if not failures else "FAIL",
            "samples": samples, "seed": seed, "failures": failures[:5]}
