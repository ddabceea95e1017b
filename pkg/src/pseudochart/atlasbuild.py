"""Explicit chart constructions with provenance trees.

Every construction here is a deterministic pure function of its
parameters (and seed, where one is drawn), and every chart records a
provenance tree from which its map can be rebuilt node by node.  The
claimed degree of a chart is the product of the leaf degrees along that
tree; the verification engine measures degrees independently and treats
the measured value as authoritative.

Base formulas, chosen once and certified symbolically downstream:

* the affine line double-covers the projective line via t -> [t^2+1 : t]
  (components share no root; the fiber polynomial b*t^2 - a*t + b over a
  target [a:b] is never a nonzero constant, so every fiber is nonempty
  over the closure);
* the product of two projective lines double-covers the projective plane
  via ([a:b],[c:d]) -> [bd : ad+bc : ac], i.e. a point pair goes to the
  binary quadratic form having that pair as its root set -- surjective
  because every nonzero binary quadratic form splits over the closure.

The product tower applies the line cover once per factor, so an n-factor
product is covered with degree 2^n, and the projective n-space chart
(tower, then multilinear embedding, then a certified general linear
projection of degree n!) has measured degree n! * 2^n.  The `erratum`
report in the CLI contrasts these measurements with the closed forms
2^(n-1) and n! * 2^(n-1) that an (n-1)-fold application would suggest.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field

from .exactpoly import QQ, MultiPoly, certify_no_common_zero, EMPTY, GF
from .varspace import (
    AFFINE,
    PROJECTIVE,
    Factor,
    PolyMap,
    Space,
    affine_space,
    compose,
    identity_map,
    map_from_json,
    product_space,
    projective_space,
    space_from_json,
)

PROJECTION_COEFF_RANGE = 9
PROJECTION_MAX_ATTEMPTS = 24
PREFILTER_PRIMES = (11, 13, 17)


class CenterMeetsVariety(Exception):
    """No certified center-disjoint projection within the retry budget."""


# ---------------------------------------------------------------------------
# provenance


@dataclass(frozen=True)
class Provenance:
    """Construction tree node.  Leaves carry their own generic degree;
    internal nodes carry the product of their children's."""

    kind: str
    degree: int
    params: tuple = ()
    children: tuple = ()

    def param(self, name, default=None):
        for k, v in self.params:
            if k == name:
                return v
        return default

    def leaf_degree_product(self) -> int:
        if not self.children:
            return self.degree
        out = 1
        for c in self.children:
            out *= c.leaf_degree_product()
        return out

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "degree": self.degree,
            "params": {k: v for k, v in self.params},
            "children": [c.to_json() for c in self.children],
        }


def provenance_from_json(obj: dict) -> Provenance:
    params = tuple(sorted((k, _freeze(v)) for k, v in obj.get("params", {}).items()))
    children = tuple(provenance_from_json(c) for c in obj.get("children", []))
    return Provenance(obj["kind"], obj["degree"], params, children)


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    if isinstance(v, dict):
        return tuple(sorted((k, _freeze(x)) for k, x in v.items()))
    return v


def _params(**kwargs) -> tuple:
    return tuple(sorted((k, _freeze(v)) for k, v in kwargs.items()))


@dataclass
class PseudoChart:
    """A polynomial map from affine n-space whose image has dimension n,
    with construction provenance and a claimed generic degree."""

    map: PolyMap
    claimed_degree: int
    provenance: Provenance

    def __post_init__(self):
        if not self.map.source.is_affine:
            raise ValueError("pseudo-chart source must be affine")
        if self.map.source.dimension != self.map.target.dimension:
            raise ValueError(
                f"source dimension {self.map.source.dimension} != target dimension "
                f"{self.map.target.dimension}")
        leaf = self.provenance.leaf_degree_product()
        if leaf != self.claimed_degree:
            raise ValueError(
                f"claimed degree {self.claimed_degree} != provenance leaf product {leaf}")

    @property
    def dimension(self) -> int:
        return self.map.source.dimension

    def to_json(self) -> dict:
        return {
            "map": self.map.to_json(),
            "claimed_degree": self.claimed_degree,
            "provenance": self.provenance.to_json(),
        }


def chart_from_json(obj: dict) -> PseudoChart:
    return PseudoChart(
        map=map_from_json(obj["map"]),
        claimed_degree=obj["claimed_degree"],
        provenance=provenance_from_json(obj["provenance"]),
    )


# ---------------------------------------------------------------------------
# base covers


def p1_double_cover() -> PseudoChart:
    """Degree-2 cover of the projective line by the affine line."""
    source = affine_space(1, names=("t",))
    target = projective_space(1, names=("x0", "y0"))
    t = MultiPoly.variable(QQ, ("t",), "t")
    one = MultiPoly.constant(QQ, ("t",), 1)
    m = PolyMap(source, target, [[t * t + one, t]], provenance="p1_double_cover")
    prov = Provenance("p1_double_cover", 2)
    return PseudoChart(m, 2, prov)


def extend_over_base(chart: PseudoChart, base: Space) -> PolyMap:
    """Product of a chart with the identity of a base space: covers the
    chart's factor and leaves the base alone; the generic degree is
    unchanged."""
    return compose_free_product(chart.map, identity_map(base, chart.map.field))


def compose_free_product(*maps: PolyMap) -> PolyMap:
    from .varspace import product_map
    return product_map(*maps)


def _flatten_affine_source(m: PolyMap) -> PolyMap:
    """Merge an all-affine source into one affine factor (names kept)."""
    if not m.source.is_affine or len(m.source.factors) == 1:
        return m
    names = m.source.all_vars
    new_source = Space((Factor(AFFINE, len(names), names),))
    return PolyMap(new_source, m.target, m.blocks, provenance=m.provenance)


def _tower_step(n: int, i: int) -> PolyMap:
    """(P^1)^i x A^{n-i} -> (P^1)^{i+1} x A^{n-i-1}: line cover on the
    i-th coordinate, identity elsewhere (affine part kept as one factor)."""
    src_factors = [Factor(PROJECTIVE, 1, (f"x{j}", f"y{j}")) for j in range(i)]
    src_factors.append(Factor(AFFINE, n - i, tuple(f"t{j}" for j in range(i, n))))
    source = Space(tuple(src_factors))
    tgt_factors = [Factor(PROJECTIVE, 1, (f"x{j}", f"y{j}")) for j in range(i + 1)]
    if n - i - 1 >= 1:
        tgt_factors.append(Factor(AFFINE, n - i - 1, tuple(f"t{j}" for j in range(i + 1, n))))
    target = Space(tuple(tgt_factors))
    sv = source.all_vars
    one = MultiPoly.constant(QQ, sv, 1)
    blocks = []
    for j in range(i):
        blocks.append([MultiPoly.variable(QQ, sv, f"x{j}"),
                       MultiPoly.variable(QQ, sv, f"y{j}")])
    ti = MultiPoly.variable(QQ, sv, f"t{i}")
    blocks.append([ti * ti + one, ti])
    if n - i - 1 >= 1:
        blocks.append([MultiPoly.variable(QQ, sv, f"t{j}") for j in range(i + 1, n)])
    return PolyMap(source, target, blocks, provenance=f"tower_step({i} of {n})")


def _tower_step_provenance(n: int, i: int) -> Provenance:
    return Provenance(
        "extend_over_base", 2,
        _params(position=i, n=n, layout="tower"),
        (Provenance("p1_double_cover", 2),))


def cover_product_p1(n: int) -> PseudoChart:
    """Chart of the n-fold product of projective lines, one line cover per
    factor; degree 2^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return p1_double_cover()
    prov = Provenance("compose", 2 ** n,
                      children=tuple(_tower_step_provenance(n, i) for i in range(n)))
    return PseudoChart(rebuild_chart_map(prov), 2 ** n, prov)


def sym2_cover() -> PolyMap:
    """Degree-2 cover of the projective plane by the product of two
    projective lines: a point pair maps to the coefficients of the binary
    quadratic form having that pair as roots.  Bidegree (1,1)."""
    source = product_space(projective_space(1, names=("a0", "b0")),
                           projective_space(1, names=("a1", "b1")))
    target = projective_space(2, names=("z0", "z1", "z2"))
    sv = source.all_vars
    a0 = MultiPoly.variable(QQ, sv, "a0")
    b0 = MultiPoly.variable(QQ, sv, "b0")
    a1 = MultiPoly.variable(QQ, sv, "a1")
    b1 = MultiPoly.variable(QQ, sv, "b1")
    return PolyMap(source, target, [[b0 * b1, a0 * b1 + b0 * a1, a0 * a1]],
                   provenance="sym2_cover")


def cover_p2() -> PseudoChart:
    """Chart of the projective plane of degree 8 = 4 * 2: the product
    tower followed by the point-pair cover."""
    tower = cover_product_p1(2)
    prov = Provenance("compose", 8, children=(tower.provenance, Provenance("sym2_cover", 2)))
    return PseudoChart(rebuild_chart_map(prov), 8, prov)


# ---------------------------------------------------------------------------
# multilinear embedding and certified linear projection


def segre(n: int) -> PolyMap:
    """The multilinear embedding of an n-fold product of projective lines:
    coordinates are all products choosing one variable per factor,
    indexed by the binary expansion of the output coordinate."""
    if not 1 <= n <= 4:
        raise ValueError("n out of range (1..4)")
    source = Space(tuple(Factor(PROJECTIVE, 1, (f"a{i}", f"b{i}")) for i in range(n)))
    target = projective_space(2 ** n - 1, prefix="z")
    sv = source.all_vars
    comps = []
    for j in range(2 ** n):
        exp = [0] * len(sv)
        for i in range(n):
            bit = (j >> (n - 1 - i)) & 1
            var = f"b{i}" if bit else f"a{i}"
            exp[sv.index(var)] = 1
        comps.append(MultiPoly.monomial(QQ, sv, exp, 1))
    return PolyMap(source, target, [comps], provenance=f"segre({n})")


@dataclass
class ProjectionDraw:
    """A certified draw of a linear projection down to P^n.

    The map is undefined on its center (a codimension n+1 linear space);
    certification checks, chart by chart of the source product of lines,
    that the pulled-back forms have no common zero, so the restriction to
    the embedded variety is a finite morphism.
    """

    map: PolyMap
    n: int
    seed: int
    attempt: int
    coeffs: tuple
    certificate: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"n": self.n, "seed": self.seed, "attempt": self.attempt,
                "coeffs": [list(row) for row in self.coeffs],
                "certificate": self.certificate}


def _projection_map(n: int, coeffs) -> PolyMap:
    source = projective_space(2 ** n - 1, prefix="z")
    target = projective_space(n, prefix="w")
    sv = source.all_vars
    comps = []
    for row in coeffs:
        acc = MultiPoly.zero(QQ, sv)
        for j, c in enumerate(row):
            if c:
                acc = acc + MultiPoly.variable(QQ, sv, f"z{j}").scale(c)
        comps.append(acc)
    return PolyMap(source, target, [comps], provenance="linear_projection")


def pullback_forms(n: int, coeffs) -> list[MultiPoly]:
    """The projection's linear forms pulled back along the multilinear
    embedding: multihomogeneous (1,...,1) forms on the product of lines."""
    s = segre(n)
    sv = s.source.all_vars
    out = []
    for row in coeffs:
        acc = MultiPoly.zero(QQ, sv)
        for j, c in enumerate(row):
            if c:
                acc = acc + s.blocks[0][j].scale(c)
        out.append(acc)
    return out


def _chart_specialize(form: MultiPoly, n: int, choice: tuple[int, ...]) -> MultiPoly:
    """Restrict a multihomogeneous form to one affine chart of the product
    of lines: per factor i, set a_i = 1 (choice 0) or b_i = 1 (choice 1),
    the other variable becoming the chart coordinate s_i."""
    chart_vars = tuple(f"s{i}" for i in range(n))
    mapping = {}
    for i in range(n):
        si = MultiPoly.variable(QQ, chart_vars, f"s{i}")
        one = MultiPoly.constant(QQ, chart_vars, 1)
        if choice[i] == 0:
            mapping[f"a{i}"] = one
            mapping[f"b{i}"] = si
        else:
            mapping[f"a{i}"] = si
            mapping[f"b{i}"] = one
    return form.substitute(mapping)


def certify_projection_center(n: int, coeffs) -> dict | None:
    """Certificate that the projection center misses the embedded product
    of lines, or None if certification failed.  Exact elimination per
    affine chart over the rationals; for n=3 a finite-field scan over a
    few primes rejects bad draws cheaply first."""
    forms = pullback_forms(n, coeffs)
    if n >= 3:
        for p in PREFILTER_PRIMES:
            if _prefilter_common_zero(forms, n, p):
                return None
    charts = {}
    for choice_idx in range(2 ** n):
        choice = tuple((choice_idx >> (n - 1 - i)) & 1 for i in range(n))
        system = [_chart_specialize(f, n, choice) for f in forms]
        outcome = certify_no_common_zero(system)
        if outcome.status != EMPTY:
            return None
        charts["".join(map(str, choice))] = outcome.to_json()
    return {"per_chart": charts, "prefilter_primes": list(PREFILTER_PRIMES) if n >= 3 else []}


def _prefilter_common_zero(forms: list[MultiPoly], n: int, p: int) -> bool:
    """True if the pulled-back forms share a zero on the product of lines
    over F_p (a cheap rejection test; the rational certificate decides)."""
    fld = GF(p)
    reduced = [f.convert_field(fld) for f in forms]
    reps = [(1, s) for s in range(p)] + [(0, 1)]
    for combo_idx in range((p + 1) ** n):
        idx = combo_idx
        coords = []
        for _ in range(n):
            coords.append(reps[idx % (p + 1)])
            idx //= (p + 1)
        flat = tuple(v for pair in coords for v in pair)
        if all(fld.is_zero(f.evaluate(flat)) for f in reduced):
            return True
    return False


def random_linear_projection(n: int, seed: int,
                             max_attempts: int = PROJECTION_MAX_ATTEMPTS) -> ProjectionDraw:
    """Draw small integer linear forms deterministically from the seed and
    certify center-disjointness, resampling on failure (bounded retries)."""
    if not 2 <= n <= 3:
        raise ValueError("n out of range (2..3)")
    rng = random.Random(seed)
    for attempt in range(max_attempts):
        coeffs = tuple(
            tuple(rng.randint(-PROJECTION_COEFF_RANGE, PROJECTION_COEFF_RANGE)
                  for _ in range(2 ** n))
            for _ in range(n + 1))
        if any(all(c == 0 for c in row) for row in coeffs):
            continue
        cert = certify_projection_center(n, coeffs)
        if cert is not None:
            return ProjectionDraw(_projection_map(n, coeffs), n, seed, attempt, coeffs, cert)
    raise CenterMeetsVariety(
        f"no certified projection found in {max_attempts} attempts (seed {seed})")


def segre_projection(n: int, seed: int) -> tuple[PolyMap, ProjectionDraw]:
    """The fused finite map from the product of lines to P^n: multilinear
    embedding followed by a certified linear projection.  Its generic
    degree is the degree n! of the embedded variety."""
    draw = random_linear_projection(n, seed)
    fused = compose(segre(n), draw.map)
    return fused, draw


def cover_pn(n: int, seed: int) -> PseudoChart:
    """Chart of projective n-space: the product tower followed by the
    fused embedding-plus-projection; claimed degree n! * 2^n."""
    if not 2 <= n <= 3:
        raise ValueError("n out of range (2..3)")
    tower = cover_product_p1(n)
    draw = random_linear_projection(n, seed)
    leaf = Provenance("segre_projection", math.factorial(n),
                      _params(n=n, seed=seed, attempt=draw.attempt,
                              coeffs=[list(r) for r in draw.coeffs]))
    prov = Provenance("compose", math.factorial(n) * 2 ** n,
                      children=(tower.provenance, leaf))
    return PseudoChart(rebuild_chart_map(prov), math.factorial(n) * 2 ** n, prov)


# ---------------------------------------------------------------------------
# split-bundle atlases


@dataclass(frozen=True)
class TransitionData:
    """Fiber-coordinate change between two chart trivializations.

    In the source chart's base coordinates (u_l = x_l / x_i, l != i), the
    fiber coordinates transform by the diagonal monomial matrix with
    entries u_j ^ (max(a) - a_k); its determinant u_j ^ sum(max(a) - a_k)
    is a monomial, nonzero off the coordinate hyperplane u_j = 0.
    """

    frm: int
    to: int
    exponents: tuple[int, ...]

    def to_json(self) -> dict:
        return {"from": self.frm, "to": self.to, "exponents": list(self.exponents)}


@dataclass
class BundleAtlas:
    """n+1 pseudo-charts of a split projective-space bundle over P^n."""

    base_dim: int
    splitting_degrees: tuple[int, ...]
    charts: list[PseudoChart]
    transitions: list[TransitionData]
    seed: int

    def to_json(self) -> dict:
        return {
            "base_dim": self.base_dim,
            "splitting_degrees": list(self.splitting_degrees),
            "charts": [c.to_json() for c in self.charts],
            "transitions": [t.to_json() for t in self.transitions],
            "seed": self.seed,
        }


def atlas_from_json(obj: dict) -> BundleAtlas:
    return BundleAtlas(
        base_dim=obj["base_dim"],
        splitting_degrees=tuple(obj["splitting_degrees"]),
        charts=[chart_from_json(c) for c in obj["charts"]],
        transitions=[TransitionData(t["from"], t["to"], tuple(t["exponents"]))
                     for t in obj["transitions"]],
        seed=obj["seed"],
    )


def bundle_atlas(n: int, degrees: tuple[int, ...], seed: int = 0) -> BundleAtlas:
    """Atlas of the projectivization of O(a_0) + ... + O(a_r) over P^n:
    one chart per standard base chart U_i = {x_i != 0}, each the fiber
    cover of P^r extended over the affine base."""
    degrees = tuple(int(a) for a in degrees)
    r = len(degrees) - 1
    if n < 1:
        raise ValueError("base dimension must be >= 1")
    if not 1 <= r <= 2:
        raise ValueError("fiber rank r out of range (1..2)")
    charts = []
    for i in range(n + 1):
        if r == 1:
            fiber_chart = p1_double_cover()
        else:
            fiber_chart = cover_pn(r, seed + i)
        base = affine_space(n, names=tuple(f"u{i}_{l}" for l in range(n)))
        prov = Provenance(
            "extend_over_base", fiber_chart.claimed_degree,
            _params(layout="base_first", prefix_factors=[base.factors[0].to_json()],
                    suffix_factors=[], chart_index=i),
            (fiber_chart.provenance,))
        charts.append(PseudoChart(rebuild_chart_map(prov), fiber_chart.claimed_degree, prov))
    amax = max(degrees)
    transitions = [TransitionData(i, j, tuple(amax - a for a in degrees))
                   for i in range(n + 1) for j in range(n + 1) if i != j]
    return BundleAtlas(n, degrees, charts, transitions, seed)


def transport_chart_point(atlas: BundleAtlas, i: int, j: int,
                          base_coords: tuple, fiber_coords: tuple):
    """Move a bundle point given in chart i's trivialization to chart j's.

    base_coords are (x_l/x_i) for l != i (ascending l); requires the j-th
    ratio to be nonzero.  Returns (new_base_coords, new_fiber_coords).
    """
    n = atlas.base_dim
    labels = [l for l in range(n + 1) if l != i]
    ratios = dict(zip(labels, base_coords))
    ratios[i] = 1  # x_i / x_i
    uj = ratios[j]
    if uj == 0:
        raise ValueError(f"point lies outside chart {j} (ratio x_{j}/x_{i} = 0)")
    new_base = tuple(ratios[l] / uj for l in range(n + 1) if l != j)
    amax = max(atlas.splitting_degrees)
    new_fiber = tuple(w * uj ** (amax - a)
                      for w, a in zip(fiber_coords, atlas.splitting_degrees))
    if all(w == 0 for w in new_fiber):
        raise ValueError("fiber coordinates vanished in transport")
    return new_base, new_fiber


# ---------------------------------------------------------------------------
# rebuilding maps from provenance


def rebuild_map(prov: Provenance) -> PolyMap:
    """Reconstruct the map of a provenance subtree (deterministic)."""
    if prov.kind == "p1_double_cover":
        return p1_double_cover().map
    if prov.kind == "sym2_cover":
        return sym2_cover()
    if prov.kind == "identity":
        return identity_map(space_from_json(_thaw(prov.param("space"))), QQ)
    if prov.kind == "segre_projection":
        n = prov.param("n")
        coeffs = [list(row) for row in prov.param("coeffs")]
        return compose(segre(n), _projection_map(n, coeffs))
    if prov.kind == "extend_over_base":
        if prov.param("layout") == "tower":
            return _tower_step(prov.param("n"), prov.param("position"))
        child = rebuild_map(prov.children[0])
        maps = []
        for fj in prov.param("prefix_factors", ()):
            maps.append(identity_map(Space((_factor_from_json(_thaw(fj)),)), QQ))
        maps.append(child)
        for fj in prov.param("suffix_factors", ()):
            maps.append(identity_map(Space((_factor_from_json(_thaw(fj)),)), QQ))
        return compose_free_product(*maps) if len(maps) > 1 else maps[0]
    if prov.kind == "compose":
        m = rebuild_map(prov.children[0])
        for c in prov.children[1:]:
            m = compose(m, rebuild_map(c))
        return m
    if prov.kind == "product":
        return compose_free_product(*(rebuild_map(c) for c in prov.children))
    raise ValueError(f"unknown provenance kind {prov.kind!r}")


def rebuild_chart_map(prov: Provenance) -> PolyMap:
    return _flatten_affine_source(rebuild_map(prov))


def _thaw(v):
    if isinstance(v, tuple):
        if v and all(isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], str) for x in v):
            return {k: _thaw(x) for k, x in v}
        return [_thaw(x) for x in v]
    return v


def _factor_from_json(obj: dict) -> Factor:
    return Factor(obj["kind"], obj["dim"], tuple(obj["vars"]))
