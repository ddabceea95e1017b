"""Products of affine and projective spaces, points, and polynomial maps.

A ``Space`` is an ordered list of factors, each affine or projective,
with per-factor variable-name blocks (globally unique inside the space).
A ``SpacePoint`` carries one coordinate vector per factor; projective
blocks are normalized so the first nonzero coordinate is 1, which gives
deterministic comparison and hashing.  A ``PolyMap`` stores one tuple of
polynomials per target factor, in the source variables.

Projective-valued components must be multihomogeneous of one common
multidegree in every source projective block, so that evaluation is well
defined on projective classes; affine-valued components must not involve
source projective variables at all.  Violations are rejected at
construction -- base loci and chart-local patching are deliberately not
modeled, so a projective block evaluating to the zero vector is an error
(``BasePointHit``) carrying the offending source point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exactpoly import CC, QQ, Field, MultiPoly, field_from_json, poly_from_json

AFFINE = "affine"
PROJECTIVE = "projective"

NUMERIC_EQ_TOL = 1e-7


class SpaceMismatchError(ValueError):
    """Spaces incompatible for the attempted operation."""


class BasePointHit(Exception):
    """A projective target block evaluated to the zero vector."""

    def __init__(self, source_point, block_index: int):
        self.witness = source_point
        self.block_index = block_index
        super().__init__(f"projective block {block_index} vanished at {source_point}")


@dataclass(frozen=True)
class Factor:
    kind: str
    dim: int
    vars: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in (AFFINE, PROJECTIVE):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("factor dimension must be >= 1")
        expected = self.dim if self.kind == AFFINE else self.dim + 1
        if len(self.vars) != expected:
            raise ValueError(
                f"{self.kind}({self.dim}) owns {expected} variables, got {self.vars}")

    @property
    def n_coords(self) -> int:
        return len(self.vars)

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "vars": list(self.vars)}


@dataclass(frozen=True)
class Space:
    factors: tuple[Factor, ...]

    def __post_init__(self):
        names = [v for f in self.factors for v in f.vars]
        if len(set(names)) != len(names):
            raise ValueError(f"variable names not globally unique: {names}")

    @property
    def all_vars(self) -> tuple[str, ...]:
        return tuple(v for f in self.factors for v in f.vars)

    @property
    def dimension(self) -> int:
        return sum(f.dim for f in self.factors)

    @property
    def is_affine(self) -> bool:
        return all(f.kind == AFFINE for f in self.factors)

    def projective_blocks(self) -> list[tuple[int, Factor]]:
        return [(i, f) for i, f in enumerate(self.factors) if f.kind == PROJECTIVE]

    def same_shape(self, other: "Space") -> bool:
        return (len(self.factors) == len(other.factors)
                and all(a.kind == b.kind and a.dim == b.dim
                        for a, b in zip(self.factors, other.factors)))

    def to_json(self) -> dict:
        return {"factors": [f.to_json() for f in self.factors]}

    def __str__(self):
        def one(f: Factor) -> str:
            return f"A^{f.dim}" if f.kind == AFFINE else f"P^{f.dim}"
        return " x ".join(one(f) for f in self.factors)


def affine_space(dim: int, names: Sequence[str] | None = None, prefix: str = "t") -> Space:
    if names is None:
        names = [f"{prefix}{i}" for i in range(dim)] if dim > 1 else [prefix]
    return Space((Factor(AFFINE, dim, tuple(names)),))

def projective_space(dim: int, names: Sequence[str] | None = None, prefix: str = "x") -> Space:
    if names is None:
        names = [f"{prefix}{i}" for i in range(dim + 1)]
    return Space((Factor(PROJECTIVE, dim, tuple(names)),))

def product_space(*spaces: Space) -> Space:
    """Concatenate factors, renaming on collision with deterministic suffixes."""
    factors: list[Factor] = []
    used: set[str] = set()
    for sp in spaces:
        for f in sp.factors:
            new_vars = []
            for v in f.vars:
                name = v
                suffix = 2
                while name in used:
                    name = f"{v}_{suffix}"
                    suffix += 1
                used.add(name)
                new_vars.append(name)
            factors.append(Factor(f.kind, f.dim, tuple(new_vars)))
    return Space(tuple(factors))

def space_from_json(obj: dict) -> Space:
    return Space(tuple(Factor(f["kind"], f["dim"], tuple(f["vars"]))
                       for f in obj["factors"]))


class SpacePoint:
    """A point of a Space over some field, stored in canonical form."""

    __slots__ = ("space", "field", "blocks")

    def __init__(self, space: Space, field: Field, blocks: Sequence[Sequence]):
        if len(blocks) != len(space.factors):
            raise ValueError(f"{len(blocks)} blocks for {len(space.factors)} factors")
        canon = []
        for f, blk in zip(space.factors, blocks):
            blk = tuple(field.coerce(v) for v in blk)
            if len(blk) != f.n_coords:
                raise ValueError(f"block length {len(blk)} for factor {f}")
            if f.kind == PROJECTIVE:
                blk = _normalize_projective(blk, field)
            canon.append(blk)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "blocks", tuple(canon))

    def __setattr__(self, name, value):
        raise AttributeError("SpacePoint is immutable")

    def coords(self) -> tuple:
        return tuple(v for blk in self.blocks for v in blk)

    def __eq__(self, other):
        if not isinstance(other, SpacePoint):
            return NotImplemented
        if not self.space.same_shape(other.space) or self.field != other.field:
            return False
        if self.field.exact:
            return all(self.field.eq(a, b)
                       for blk_a, blk_b in zip(self.blocks, other.blocks)
                       for a, b in zip(blk_a, blk_b))
        return self.approx_equal(other)

    def approx_equal(self, other: "SpacePoint", tol: float = NUMERIC_EQ_TOL) -> bool:
        for blk_a, blk_b in zip(self.blocks, other.blocks):
            for a, b in zip(blk_a, blk_b):
                if abs(complex(a) - complex(b)) > tol:
                    return False
        return True

    def __hash__(self):
        if not self.field.exact:
            raise TypeError("numeric points are not hashable (tolerance equality)")
        return hash((self.field, self.blocks))

    def __repr__(self):
        parts = []
        for f, blk in zip(self.space.factors, self.blocks):
            inner = ":".join(self.field.element_str(v) for v in blk)
            parts.append(f"[{inner}]" if f.kind == PROJECTIVE else f"({inner})")
        return "x".join(parts)

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "field": self.field.to_json(),
            "blocks": [[self.field.element_to_json(v) for v in blk] for blk in self.blocks],
        }


def point_from_json(obj: dict) -> SpacePoint:
    space = space_from_json(obj["space"])
    field = field_from_json(obj["field"])
    blocks = [[field.element_from_json(v) for v in blk] for blk in obj["blocks"]]
    return SpacePoint(space, field, blocks)


def _normalize_projective(blk: tuple, field: Field) -> tuple:
    if field.exact:
        pivot = next((v for v in blk if not field.is_zero(v)), None)
    else:
        maxabs = max(abs(complex(v)) for v in blk)
        if maxabs == 0:
            pivot = None
        else:
            pivot = next(v for v in blk if abs(complex(v)) > 1e-12 * maxabs)
    if pivot is None:
        raise ValueError("projective block is identically zero")
    inv = field.inv(pivot)
    return tuple(field.mul(v, inv) for v in blk)


class PolyMap:
    """A polynomial map between spaces: one component tuple per target factor."""

    __slots__ = ("source", "target", "blocks", "provenance", "multidegrees")

    def __init__(self, source: Space, target: Space,
                 blocks: Sequence[Sequence[MultiPoly]], provenance: str = ""):
        blocks = tuple(tuple(b) for b in blocks)
        if len(blocks) != len(target.factors):
            raise ValueError(f"{len(blocks)} component blocks for {len(target.factors)} target factors")
        field = None
        for blk, f in zip(blocks, target.factors):
            if len(blk) != f.n_coords:
                raise ValueError(f"block of {len(blk)} components for factor {f}")
            for comp in blk:
                if comp.vars != source.all_vars:
                    raise ValueError(
                        f"component variables {comp.vars} do not match source {source.all_vars}")
                if field is None:
                    field = comp.field
                else:
                    field.require_same(comp.field)
        if field is None:
            raise ValueError("empty map")
        multidegrees = _validate_multihomogeneity(source, target, blocks)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "provenance", provenance)
        object.__setattr__(self, "multidegrees", multidegrees)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMap is immutable")

    @property
    def field(self) -> Field:
        return self.blocks[0][0].field

    def components(self) -> list[MultiPoly]:
        return [c for blk in self.blocks for c in blk]

    def evaluate(self, point: SpacePoint, field: Field | None = None) -> SpacePoint:
        """Evaluate at a point; canonical normalization on projective blocks.

        Well defined on projective classes by the multihomogeneity
        invariant.  Raises BasePointHit if a projective block vanishes.
        """
        if not point.space.same_shape(self.source):
            raise SpaceMismatchError(f"point lives in {point.space}, map source is {self.source}")
        f = field if field is not None else point.field
        coords = point.coords()
        out_blocks = []
        for i, (blk, fac) in enumerate(zip(self.blocks, self.target.factors)):
            values = tuple(comp.evaluate(coords, field=f) for comp in blk)
            if fac.kind == PROJECTIVE:
                if f.exact:
                    all_zero = all(f.is_zero(v) for v in values)
                else:
                    all_zero = all(abs(complex(v)) < 1e-12 for v in values)
                if all_zero:
                    raise BasePointHit(point, i)
            out_blocks.append(values)
        return SpacePoint(self.target, f, out_blocks)

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.blocks == other.blocks)

    def __repr__(self):
        return f"PolyMap({self.source} -> {self.target})"

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "blocks": [[c.to_json() for c in blk] for blk in self.blocks],
            "provenance": self.provenance,
            "multidegrees": [[list(d) for d in row] for row in self.multidegrees],
        }


def map_from_json(obj: dict) -> PolyMap:
    source = space_from_json(obj["source"])
    target = space_from_json(obj["target"])
    blocks = [[poly_from_json(c) for c in blk] for blk in obj["blocks"]]
    return PolyMap(source, target, blocks, provenance=obj.get("provenance", ""))


def _validate_multihomogeneity(source: Space, target: Space, blocks) -> tuple:
    """Per (target block, source projective block) multidegree table.

    Projective target blocks: all nonzero components share one degree per
    source projective block.  Affine target blocks: degree 0 in every
    source projective block (genuinely affine-valued).
    """
    proj_blocks = source.projective_blocks()
    table = []
    for blk, fac in zip(blocks, target.factors):
        row = []
        for _, src_fac in proj_blocks:
            degrees_seen: set[int] = set()
            for comp in blk:
                if comp.is_zero:
                    continue
                degs = comp.degrees_in_block(src_fac.vars)
                if len(degs) > 1:
                    raise ValueError(
                        f"component {comp} is inhomogeneous in block {src_fac.vars}: degrees {sorted(degs)}")
                degrees_seen.update(degs)
            if fac.kind == PROJECTIVE:
                if len(degrees_seen) > 1:
                    raise ValueError(
                        f"projective target block has mixed multidegrees {sorted(degrees_seen)} "
                        f"in source block {src_fac.vars}")
                row.append((degrees_seen.pop() if degrees_seen else 0))
            else:
                if degrees_seen and degrees_seen != {0}:
                    raise ValueError(
                        f"affine target block involves projective source block {src_fac.vars}")
                row.append(0)
        table.append(tuple(row))
    return tuple(table)


def identity_map(space: Space, field: Field = QQ) -> PolyMap:
    all_vars = space.all_vars
    blocks = []
    for f in space.factors:
        blocks.append([MultiPoly.variable(field, all_vars, v) for v in f.vars])
    return PolyMap(space, space, blocks, provenance="identity")


def compose(f: PolyMap, g: PolyMap) -> PolyMap:
    """g after f.  Requires f's target and g's source to have the same shape;
    components are substituted positionally."""
    if not f.target.same_shape(g.source):
        raise SpaceMismatchError(f"cannot compose: {f.target} vs {g.source}")
    f.field.require_same(g.field)
    src_vars = f.source.all_vars
    assignment = {}
    f_components = f.components()
    for var, comp in zip(g.source.all_vars, f_components):
        assignment[var] = comp
    zero = MultiPoly.zero(f.field, src_vars)
    blocks = []
    for blk in g.blocks:
        out = []
        for comp in blk:
            if comp.is_zero:
                out.append(zero)
            else:
                out.append(comp.substitute(assignment))
        blocks.append(out)
    prov = f"compose({f.provenance}; {g.provenance})"
    return PolyMap(f.source, g.target, blocks, provenance=prov)


def product_map(*maps: PolyMap) -> PolyMap:
    """Product of maps on product spaces; blocks evaluated independently.

    Source/target variable blocks are renamed with deterministic suffixes
    when they collide.
    """
    if not maps:
        raise ValueError("empty product")
    field = maps[0].field
    for m in maps[1:]:
        field.require_same(m.field)
    source = product_space(*(m.source for m in maps))
    target = product_space(*(m.target for m in maps))
    all_src = source.all_vars
    blocks = []
    offset = 0
    for m in maps:
        n = len(m.source.all_vars)
        local_names = all_src[offset:offset + n]
        rename = dict(zip(m.source.all_vars, local_names))
        for blk in m.blocks:
            out = []
            for comp in blk:
                renamed = comp.rename_vars(rename) if rename else comp
                out.append(renamed.extend_vars(all_src))
            blocks.append(out)
        offset += n
    prov = "product(" + "; ".join(m.provenance for m in maps) + ")"
    return PolyMap(source, target, blocks, provenance=prov)
