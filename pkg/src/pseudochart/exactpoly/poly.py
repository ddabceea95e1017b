"""Sparse multivariate polynomials over an exact scalar field.

A polynomial is a ``MultiPoly``: a field tag, an ordered tuple of variable
names, and a tuple of ``(exponent_vector, coefficient)`` terms.  Terms are
kept canonical at all times: no zero coefficients, pairwise-distinct
exponent vectors, descending graded-lexicographic order.  The polynomials
handled here are low-degree but can live in many variables (products of
projective factors), so the sparse representation is the natural one.

Arithmetic requires both operands to share the variable tuple and the
field tag; anything else raises instead of coercing.

Serialization: ``{"field": {...}, "vars": [...], "terms": [{"e": [...],
"c": ...}]}`` with rational coefficients as ``"num/den"`` strings and
finite-field coefficients as residue lists.  Round-trips are bit-exact.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .fields import CC, Field, FieldMismatchError, field_from_json


class VariableMismatchError(ValueError):
    """Operands live over different variable tuples."""


def _grlex_key(exp: tuple[int, ...]):
    return (sum(exp), exp)


class MultiPoly:
    __slots__ = ("field", "vars", "terms")

    def __init__(self, field: Field, variables: Sequence[str],
                 terms: Iterable[tuple[tuple[int, ...], object]]):
        vars_t = tuple(variables)
        acc: dict[tuple[int, ...], object] = {}
        for exp, coeff in terms:
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(vars_t):
                raise ValueError(f"exponent vector {exp} does not match variables {vars_t}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            if exp in acc:
                acc[exp] = field.add(acc[exp], coeff)
            else:
                acc[exp] = coeff
        kept = [(e, c) for e, c in acc.items() if not field.is_zero(c)]
        kept.sort(key=lambda t: _grlex_key(t[0]), reverse=True)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "vars", vars_t)
        object.__setattr__(self, "terms", tuple(kept))

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # --- constructors ---

    @classmethod
    def zero(cls, field: Field, variables: Sequence[str]) -> "MultiPoly":
        return cls(field, variables, [])

    @classmethod
    def constant(cls, field: Field, variables: Sequence[str], value) -> "MultiPoly":
        value = field.coerce(value)
        return cls(field, variables, [((0,) * len(tuple(variables)), value)])

    @classmethod
    def variable(cls, field: Field, variables: Sequence[str], name: str) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatchError(f"unknown variable {name!r} in {variables}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(field, variables, [(exp, field.one())])

    @classmethod
    def monomial(cls, field: Field, variables: Sequence[str],
                 exponents: Sequence[int], coeff) -> "MultiPoly":
        return cls(field, variables, [(tuple(exponents), field.coerce(coeff))])

    # --- inspection ---

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exp) for exp, _ in self.terms)

    def constant_value(self):
        if not self.terms:
            return self.field.zero()
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return self.terms[0][1]

    @property
    def total_degree(self) -> int:
        """Total degree; 0 for the zero polynomial."""
        return max((sum(exp) for exp, _ in self.terms), default=0)

    def degree_in(self, var: str) -> int:
        i = self._var_index(var)
        return max((exp[i] for exp, _ in self.terms), default=0)

    def occurring_vars(self) -> tuple[str, ...]:
        seen = [False] * len(self.vars)
        for exp, _ in self.terms:
            for i, e in enumerate(exp):
                if e:
                    seen[i] = True
        return tuple(v for v, s in zip(self.vars, seen) if s)

    def degrees_in_block(self, block: Sequence[str]) -> set[int]:
        """Set of per-term total degrees in the given variable block."""
        idx = [self._var_index(v) for v in block]
        return {sum(exp[i] for i in idx) for exp, _ in self.terms}

    def _var_index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise VariableMismatchError(f"unknown variable {var!r} in {self.vars}") from None

    def _check_compatible(self, other: "MultiPoly") -> None:
        self.field.require_same(other.field)
        if self.vars != other.vars:
            raise VariableMismatchError(f"variable sets differ: {self.vars} vs {other.vars}")

    # --- arithmetic ---

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_compatible(other)
        return MultiPoly(self.field, self.vars, list(self.terms) + list(other.terms))

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_compatible(other)
        neg = [(e, self.field.neg(c)) for e, c in other.terms]
        return MultiPoly(self.field, self.vars, list(self.terms) + neg)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.field, self.vars,
                         [(e, self.field.neg(c)) for e, c in self.terms])

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_compatible(other)
        f = self.field
        acc: dict[tuple[int, ...], object] = {}
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                e = tuple(x + y for x, y in zip(ea, eb))
                c = f.mul(ca, cb)
                if e in acc:
                    acc[e] = f.add(acc[e], c)
                else:
                    acc[e] = c
        return MultiPoly(f, self.vars, acc.items())

    def scale(self, c) -> "MultiPoly":
        c = self.field.coerce(c)
        return MultiPoly(self.field, self.vars,
                         [(e, self.field.mul(coeff, c)) for e, coeff in self.terms])

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.constant(self.field, self.vars, self.field.one())
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.field == other.field and self.vars == other.vars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.field, self.vars, self.terms))

    # --- evaluation / substitution / calculus ---

    def evaluate(self, point: Sequence, field: Field | None = None):
        """Evaluate at a point given in ``field`` (default: own field).

        Rational polynomials may be evaluated at points of another field;
        coefficients are converted explicitly (e.g. into the complex
        numeric backend, or reduced mod p).
        """
        f = field if field is not None else self.field
        if len(point) != len(self.vars):
            raise ValueError(f"arity mismatch: {len(point)} values for {len(self.vars)} variables")
        max_exp = [0] * len(self.vars)
        for exp, _ in self.terms:
            for i, e in enumerate(exp):
                if e > max_exp[i]:
                    max_exp[i] = e
        powers: list[list] = []
        for i, x in enumerate(point):
            row = [f.one()]
            for _ in range(max_exp[i]):
                row.append(f.mul(row[-1], x))
            powers.append(row)
        acc = f.zero()
        for exp, coeff in self.terms:
            c = coeff if f == self.field else f.convert(coeff, self.field)
            term = c
            for i, e in enumerate(exp):
                if e:
                    term = f.mul(term, powers[i][e])
            acc = f.add(acc, term)
        return acc

    def substitute(self, assignment: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Substitute polynomials for variables.

        Every variable occurring in ``self`` must be assigned; all images
        must share one (field, variables) pair, which becomes the result's.
        """
        occurring = self.occurring_vars()
        for v in occurring:
            if v not in assignment:
                raise VariableMismatchError(f"missing assignment for variable {v!r}")
        images = [assignment[v] for v in occurring]
        if not images:
            # constant polynomial: re-express over the target variables if known
            if assignment:
                tgt = next(iter(assignment.values()))
                c = self.field.zero() if self.is_zero else self.constant_value()
                if tgt.field != self.field:
                    c = tgt.field.convert(c, self.field)
                return MultiPoly.constant(tgt.field, tgt.vars, c)
            return self
        tgt_field, tgt_vars = images[0].field, images[0].vars
        for img in images[1:]:
            img._check_compatible(images[0])
        idx = {v: i for i, v in enumerate(self.vars)}
        pow_cache: dict[tuple[str, int], MultiPoly] = {}

        def img_pow(v: str, e: int) -> MultiPoly:
            key = (v, e)
            if key not in pow_cache:
                pow_cache[key] = assignment[v] ** e
            return pow_cache[key]

        acc = MultiPoly.zero(tgt_field, tgt_vars)
        for exp, coeff in self.terms:
            c = coeff if tgt_field == self.field else tgt_field.convert(coeff, self.field)
            term = MultiPoly.constant(tgt_field, tgt_vars, c)
            for v in occurring:
                e = exp[idx[v]]
                if e:
                    term = term * img_pow(v, e)
            acc = acc + term
        return acc

    def partial_derivative(self, var: str) -> "MultiPoly":
        i = self._var_index(var)
        f = self.field
        out = []
        for exp, coeff in self.terms:
            e = exp[i]
            if e:
                new_exp = exp[:i] + (e - 1,) + exp[i + 1:]
                out.append((new_exp, f.mul(coeff, f.from_int(e))))
        return MultiPoly(f, self.vars, out)

    def coefficient_of(self, var: str, power: int) -> "MultiPoly":
        """Coefficient of var^power, as a polynomial of degree 0 in var."""
        i = self._var_index(var)
        out = []
        for exp, coeff in self.terms:
            if exp[i] == power:
                new_exp = exp[:i] + (0,) + exp[i + 1:]
                out.append((new_exp, coeff))
        return MultiPoly(self.field, self.vars, out)

    def extend_vars(self, new_vars: Sequence[str]) -> "MultiPoly":
        """Re-express over a superset variable tuple (order-preserving embed)."""
        new_vars = tuple(new_vars)
        pos = []
        for v in self.vars:
            if v not in new_vars:
                raise VariableMismatchError(f"{v!r} missing from new variable tuple")
            pos.append(new_vars.index(v))
        out = []
        for exp, coeff in self.terms:
            new_exp = [0] * len(new_vars)
            for p, e in zip(pos, exp):
                new_exp[p] = e
            out.append((tuple(new_exp), coeff))
        return MultiPoly(self.field, new_vars, out)

    def rename_vars(self, mapping: Mapping[str, str]) -> "MultiPoly":
        new_vars = tuple(mapping.get(v, v) for v in self.vars)
        if len(set(new_vars)) != len(new_vars):
            raise VariableMismatchError(f"renaming produced duplicates: {new_vars}")
        return MultiPoly(self.field, new_vars, self.terms)

    def convert_field(self, field: Field) -> "MultiPoly":
        if field == self.field:
            return self
        return MultiPoly(field, self.vars,
                         [(e, field.convert(c, self.field)) for e, c in self.terms])

    # --- display / serialization ---

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp, coeff in self.terms:
            mono = "*".join(
                f"{v}^{e}" if e > 1 else v
                for v, e in zip(self.vars, exp) if e
            )
            cs = self.field.element_str(coeff)
            if mono:
                parts.append(f"{cs}*{mono}" if cs != "1" else mono)
            else:
                parts.append(cs)
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "vars": list(self.vars),
            "terms": [{"e": list(exp), "c": self.field.element_to_json(coeff)}
                      for exp, coeff in self.terms],
        }


def poly_from_json(obj: dict) -> MultiPoly:
    field = field_from_json(obj["field"])
    variables = tuple(obj["vars"])
    terms = [(tuple(t["e"]), field.element_from_json(t["c"])) for t in obj["terms"]]
    return MultiPoly(field, variables, terms)


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Dispatcher form of +, -, *; rejects mismatched fields/variables."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def to_complex_coeffs(p: MultiPoly, var: str) -> list[complex]:
    """Little-endian complex coefficient list of a univariate polynomial."""
    coeffs = [0j] * (p.degree_in(var) + 1)
    i = p._var_index(var)
    for exp, coeff in p.terms:
        rest = sum(exp) - exp[i]
        if rest:
            raise ValueError(f"{p} is not univariate in {var!r}")
        coeffs[exp[i]] += CC.convert(coeff, p.field) if p.field != CC else coeff
    return coeffs


def univariate_coeffs(p: MultiPoly, var: str) -> list:
    """Little-endian coefficient list (own field) of a univariate polynomial."""
    i = p._var_index(var)
    coeffs = [p.field.zero()] * (p.degree_in(var) + 1)
    for exp, coeff in p.terms:
        if sum(exp) - exp[i]:
            raise ValueError(f"{p} is not univariate in {var!r}")
        coeffs[exp[i]] = p.field.add(coeffs[exp[i]], coeff)
    return coeffs
