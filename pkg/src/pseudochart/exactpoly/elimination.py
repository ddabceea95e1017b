"""Common-zero certificates for small polynomial systems.

Everything here rests on one sound fact: a resultant lies in the ideal
generated by its two inputs, so it vanishes at every common zero of the
system.  Eliminating variables by iterated resultants therefore never
loses zeros; deriving a nonzero constant certifies emptiness.  The
converse direction (a zero of the eliminants extending upward) is NOT
assumed: candidate points are enumerated exactly where possible
(rational-root deflation, finite-field scans) and each one is verified by
back-substitution.  A ``complete`` flag tracks whether the candidate
enumeration provably covered all closure zeros; only then can "no
candidate extends" be promoted to an emptiness certificate.

Systems here are desk-scale: a handful of variables, modest degrees.
Budget breaches surface as INCONCLUSIVE, never as silent wrong answers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .fields import GF, Field, PrimeField, ExtensionField, RationalField
from .poly import MultiPoly, univariate_coeffs
from .resultant import resultant
from .roots import finite_field_roots

EMPTY = "EMPTY"
WITNESS = "WITNESS"
INCONCLUSIVE = "INCONCLUSIVE"
UNCONSTRAINED = "UNCONSTRAINED"

MAX_CANDIDATES = 64
MAX_ELIM_DEGREE = 260
MAX_FACTOR_BOUND = 10 ** 9
MAX_DEPTH = 6


@dataclass
class EliminationOutcome:
    status: str
    witness: tuple | None = None
    witness_field: Field | None = None
    chain: list = dc_field(default_factory=list)
    budget_exceeded: bool = False
    notes: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        out = {"status": self.status, "chain": self.chain, "notes": self.notes}
        if self.witness is not None:
            out["witness"] = [self.witness_field.element_str(v) for v in self.witness]
            out["witness_field"] = self.witness_field.to_json()
        if self.budget_exceeded:
            out["budget_exceeded"] = True
        return out


@dataclass
class _Candidates:
    """Result of solving a (sub)system.

    points: list of (values_dict, field) pairs, each a verified common
    zero of the subsystem restricted to the variables it constrains.
    """
    status: str
    points: list[tuple[dict, Field]]
    complete: bool
    budget: bool = False


def _divisors(n: int) -> list[int] | None:
    n = abs(n)
    if n == 0:
        return None
    if n > MAX_FACTOR_BOUND:
        return None
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def rational_roots_with_completeness(coeffs: list[Fraction]) -> tuple[list[tuple[Fraction, int]], bool]:
    """Rational roots (with multiplicity) of a nonzero rational univariate
    polynomial, little-endian coefficients; the flag tells whether they
    exhaust ALL closure roots (true exactly when deflation empties the
    polynomial)."""
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial")
    zero_mult = 0
    while coeffs[0] == 0:
        coeffs.pop(0)
        zero_mult += 1
    roots: list[tuple[Fraction, int]] = []
    if zero_mult:
        roots.append((Fraction(0), zero_mult))
    if len(coeffs) == 1:
        return roots, True
    denom_lcm = 1
    for c in coeffs:
        denom_lcm = denom_lcm * c.denominator // _gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in coeffs]
    d0 = _divisors(ints[0])
    dn = _divisors(ints[-1])
    if d0 is None or dn is None:
        return roots, False
    candidates = set()
    for num in d0:
        for den in dn:
            candidates.add(Fraction(num, den))
            candidates.add(Fraction(-num, den))
    work = [Fraction(c) for c in ints]
    for cand in sorted(candidates):
        while len(work) > 1:
            acc = Fraction(0)
            synth = []
            for c in reversed(work):
                acc = acc * cand + c
                synth.append(acc)
            if synth[-1] != 0:
                break
            work = list(reversed(synth[:-1]))
            for i, (r, m) in enumerate(roots):
                if r == cand:
                    roots[i] = (r, m + 1)
                    break
            else:
                roots.append((cand, 1))
    return roots, len(work) == 1


def _finite_roots_with_completeness(p: MultiPoly, var: str) -> tuple[list, bool, Field]:
    """Closure roots of a finite-field univariate polynomial, scanned in
    the smallest extension guaranteed to split the degree (quadratics get
    the degree-2 extension; higher degrees scan the base field only and
    report incompleteness unless everything split)."""
    f = p.field
    base_k = f.k if isinstance(f, ExtensionField) else 1
    deg = p.degree_in(var)
    if deg <= 1:
        scan_field = f
    elif deg == 2:
        scan_field = GF(f.p, 2 * base_k)
    else:
        scan_field = f
    work = p if scan_field == f else p.convert_field(scan_field)
    found = finite_field_roots(work)
    complete = sum(m for _, m in found) == deg
    return [r for r, _ in found], complete, scan_field


def _univariate_system(polys: list[MultiPoly], var: str) -> tuple[_Candidates, list]:
    """Common closure zeros of polynomials univariate in ``var``."""
    chain: list = []
    live = [p for p in polys if not p.is_zero]
    for p in live:
        if p.is_constant:
            chain.append({"step": "constant_in_ideal", "value": str(p)})
            return _Candidates(EMPTY, [], True), chain
        if p.occurring_vars() != (var,):
            raise ValueError(f"system member {p} is not univariate in {var!r}")
    if not live:
        return _Candidates(UNCONSTRAINED, [], False), chain
    live.sort(key=lambda p: p.degree_in(var))
    if len(live) >= 2:
        for q in live[1:]:
            r = resultant(live[0], q, var)
            if not r.is_zero:
                chain.append({"step": "coprime_pair", "resultant": str(r)})
                return _Candidates(EMPTY, [], True), chain
    f = polys[0].field
    if isinstance(f, RationalField):
        pairs, complete = rational_roots_with_completeness(univariate_coeffs(live[0], var))
        roots = [r for r, _ in pairs]
        root_field: Field = f
    elif isinstance(f, (PrimeField, ExtensionField)):
        roots, complete, root_field = _finite_roots_with_completeness(live[0], var)
    else:
        return _Candidates(INCONCLUSIVE, [], False), chain
    verified = []
    for r in roots:
        ok = True
        for q in live[1:]:
            work = q if q.field == root_field else q.convert_field(root_field)
            point = [root_field.zero()] * len(work.vars)
            point[work.vars.index(var)] = r
            if not root_field.is_zero(work.evaluate(point)):
                ok = False
                break
        if ok:
            verified.append(({var: r}, root_field))
    chain.append({"step": "univariate", "var": var, "poly": str(live[0]),
                  "candidates": len(roots), "verified": len(verified),
                  "complete": complete})
    if not verified:
        return _Candidates(EMPTY if complete else INCONCLUSIVE, [], complete), chain
    return _Candidates(WITNESS, verified, complete), chain


def _specialize(p: MultiPoly, values: dict[str, object], value_field: Field) -> MultiPoly:
    work = p if p.field == value_field else p.convert_field(value_field)
    mapping = {}
    for v in work.occurring_vars():
        if v in values:
            mapping[v] = MultiPoly.constant(value_field, work.vars, values[v])
        else:
            mapping[v] = MultiPoly.variable(value_field, work.vars, v)
    return work.substitute(mapping)


def _solve(polys: list[MultiPoly], variables: list[str], chain: list,
           depth: int = 0) -> _Candidates:
    if depth > MAX_DEPTH:
        return _Candidates(INCONCLUSIVE, [], False, budget=True)
    live = [p for p in polys if not p.is_zero]
    for p in live:
        if p.is_constant:
            chain.append({"step": "constant_in_ideal", "value": str(p)})
            return _Candidates(EMPTY, [], True)
    occurring: set[str] = set()
    for p in live:
        occurring.update(p.occurring_vars())
    active = [v for v in variables if v in occurring]
    if not live or not active:
        return _Candidates(UNCONSTRAINED, [], False)
    if len(active) == 1:
        res, sub_chain = _univariate_system(live, active[0])
        chain.extend(sub_chain)
        return res
    v = active[-1]
    with_v = sorted((p for p in live if p.degree_in(v) > 0), key=lambda p: p.degree_in(v))
    without_v = [p for p in live if p.degree_in(v) == 0]
    pivot = with_v[0]
    # resultants of all pairs (they all lie in the ideal); extraneous
    # factors of one pair are generically cut down by the others
    if len(with_v) <= 6:
        pairs = [(with_v[i], with_v[j])
                 for i in range(len(with_v)) for j in range(i + 1, len(with_v))]
    else:
        pairs = [(pivot, q) for q in with_v[1:]]
    eliminants = list(without_v)
    for f, q in pairs:
        r = resultant(f, q, v)
        if r.total_degree > MAX_ELIM_DEGREE:
            return _Candidates(INCONCLUSIVE, [], False, budget=True)
        if not r.is_zero:
            eliminants.append(r)
    chain.append({"step": "eliminate", "var": v, "pivot": str(pivot),
                  "eliminants": [str(e) for e in eliminants]})
    if not eliminants:
        return _Candidates(UNCONSTRAINED, [], False)
    sub = _solve(eliminants, [w for w in variables if w != v], chain, depth + 1)
    if sub.status == EMPTY:
        return _Candidates(EMPTY, [], True)
    if sub.status in (INCONCLUSIVE, UNCONSTRAINED):
        return _Candidates(INCONCLUSIVE, [], False, budget=sub.budget)
    extended: list[tuple[dict, Field]] = []
    all_complete = sub.complete and len(sub.points) <= MAX_CANDIDATES
    for values, val_field in sub.points[:MAX_CANDIDATES]:
        specialized = [_specialize(p, values, val_field) for p in live]
        inner = _solve(specialized, [w for w in variables if w not in values], chain, depth + 1)
        chain.append({"step": "specialize",
                      "at": {k: val_field.element_str(x) for k, x in values.items()},
                      "result": inner.status})
        if inner.status == WITNESS:
            for inner_values, inner_field in inner.points:
                merged = dict(values)
                if inner_field != val_field:
                    merged = {k: inner_field.convert(x, val_field) for k, x in merged.items()}
                merged.update(inner_values)
                extended.append((merged, inner_field))
            if not inner.complete:
                all_complete = False
        elif inner.status == EMPTY:
            pass
        else:
            all_complete = False
    if extended:
        return _Candidates(WITNESS, extended, all_complete)
    if all_complete:
        return _Candidates(EMPTY, [], True)
    return _Candidates(INCONCLUSIVE, [], False)


def certify_no_common_zero(polys: list[MultiPoly]) -> EliminationOutcome:
    """Decide whether a system has a common zero over the algebraic
    closure (affine).  EMPTY outcomes are certificates; WITNESS outcomes
    carry a verified point; INCONCLUSIVE means the desk-scale machinery
    could not decide."""
    if not polys:
        raise ValueError("empty system")
    variables = list(polys[0].vars)
    chain: list = []
    res = _solve(polys, variables, chain)
    if res.status == EMPTY:
        return EliminationOutcome(EMPTY, chain=chain)
    if res.status == WITNESS and res.points:
        values, f = res.points[0]
        witness = tuple(values.get(v, f.zero()) for v in variables)
        for p in polys:
            work = p if p.field == f else p.convert_field(f)
            if not f.is_zero(work.evaluate(witness)):
                return EliminationOutcome(INCONCLUSIVE, chain=chain,
                                          notes=["candidate failed full verification"])
        return EliminationOutcome(WITNESS, witness=witness, witness_field=f, chain=chain)
    notes = []
    if res.status == UNCONSTRAINED:
        notes.append("underdetermined system")
    found = search_witness(polys)
    if found is not None:
        return EliminationOutcome(WITNESS, witness=found[0], witness_field=found[1],
                                  chain=chain, notes=notes)
    return EliminationOutcome(INCONCLUSIVE, chain=chain, budget_exceeded=res.budget,
                              notes=notes)


def search_witness(polys: list[MultiPoly], rational_radius: int = 3,
                   primes: tuple[int, ...] = (5, 7, 11, 13),
                   point_cap: int = 200_000):
    """Hunt for an exact common zero: small rational grid first, then
    finite-field scans.  Returns (point, field) or None."""
    if not polys:
        return None
    variables = polys[0].vars
    n = len(variables)
    f = polys[0].field

    if isinstance(f, RationalField):
        grid = [Fraction(i) for i in range(-rational_radius, rational_radius + 1)]
        if len(grid) ** n <= point_cap:
            for combo in itertools.product(grid, repeat=n):
                if all(f.is_zero(p.evaluate(combo)) for p in polys):
                    return tuple(combo), f
        for pr in primes:
            if pr ** n > point_cap:
                continue
            fld = GF(pr)
            try:
                reduced = [p.convert_field(fld) for p in polys]
            except ZeroDivisionError:
                continue
            for combo in itertools.product(range(pr), repeat=n):
                if all(fld.is_zero(p.evaluate(combo)) for p in reduced):
                    return tuple(combo), fld
        return None

    if isinstance(f, (PrimeField, ExtensionField)):
        order = f.p ** (f.k if isinstance(f, ExtensionField) else 1)
        if order ** n <= point_cap:
            for combo in itertools.product(list(f.elements()), repeat=n):
                if all(f.is_zero(p.evaluate(combo)) for p in polys):
                    return tuple(combo), f
    return None


def unconstrained_vars(polys: list[MultiPoly]) -> list[str]:
    """Variables constrained by no nonzero equation (a positive-dimensional
    fiber signal when the system came from fibering a map)."""
    if not polys:
        return []
    occurring: set[str] = set()
    for p in polys:
        if not p.is_zero:
            occurring.update(p.occurring_vars())
    return [v for v in polys[0].vars if v not in occurring]
