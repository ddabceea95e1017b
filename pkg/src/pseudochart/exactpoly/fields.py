"""Exact coefficient fields for polynomial arithmetic.

Four kinds of field are supported:

* ``QQ`` -- arbitrary-precision rationals.  Elements are
  ``fractions.Fraction`` values, always in lowest terms with positive
  denominator (the ``Fraction`` class guarantees both).
* ``GF(p)`` -- integers mod a prime ``p``, canonical representatives
  ``0 .. p-1``.
* ``GF(p, k)`` -- the field with ``p^k`` elements, represented as residue
  vectors of length ``k`` modulo a fixed irreducible monic modulus of
  degree ``k``.  The modulus is chosen deterministically: candidates
  ``x^k + c_{k-1} x^{k-1} + ... + c_0`` are enumerated in base-``p``
  counting order of ``(c_0, ..., c_{k-1})`` and the first irreducible one
  wins, so two constructions of the same field always agree.
* ``CC`` -- double-precision complex numbers, the numeric backend.  Not
  exact; equality is up to a tolerance handled by callers.

Elements are plain Python values (``Fraction`` / ``int`` / ``tuple`` /
``complex``); the field object interprets and combines them.  Mixing
values from different fields raises ``FieldMismatchError`` -- there is no
silent coercion.  Explicit cross-field conversion is provided by
``Field.convert`` (reduction mod p, constant embeddings F_p -> F_{p^k},
subfield embeddings F_{p^j} -> F_{p^m} for j | m, and float conversion
into the numeric backend).
"""

from __future__ import annotations

import functools
from fractions import Fraction
from typing import Iterator


class FieldMismatchError(TypeError):
    """Raised when values tagged with different fields are combined."""


class NotInvertibleError(ZeroDivisionError):
    """Raised when inverting zero (or a non-unit)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """Base class; subclasses interpret raw element values."""

    kind = "?"
    exact = True

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, n: int):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        raise NotImplementedError

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result = self.one()
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def require_same(self, other: "Field") -> None:
        if self != other:
            raise FieldMismatchError(f"field mismatch: {self} vs {other}")

    def convert(self, value, src: "Field"):
        """Explicitly move ``value`` from field ``src`` into this field."""
        raise NotImplementedError

    def element_str(self, a) -> str:
        return str(a)

    def element_to_json(self, a):
        raise NotImplementedError

    def element_from_json(self, obj):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


class RationalField(Field):
    kind = "rational"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n: int):
        return Fraction(n)

    def coerce(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"cannot interpret {x!r} as a rational")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise NotInvertibleError("inverse of 0")
        return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def eq(self, a, b) -> bool:
        return a == b

    def convert(self, value, src: Field):
        if src == self:
            return value
        raise FieldMismatchError(f"no conversion {src} -> QQ")

    def element_str(self, a) -> str:
        return str(a)

    def element_to_json(self, a):
        return f"{a.numerator}/{a.denominator}"

    def element_from_json(self, obj):
        if not isinstance(obj, str):
            raise ValueError(f"rational coefficient must be a 'num/den' string, got {obj!r}")
        return Fraction(obj)

    def to_json(self) -> dict:
        return {"kind": "rational"}

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


# --- univariate polynomial helpers over F_p (little-endian coeff lists) ---

def _pf_trim(cs: list[int]) -> list[int]:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs

def _pf_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pf_trim(out)

def _pf_sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        ai = a[i] if i < len(a) else 0
        bi = b[i] if i < len(b) else 0
        out[i] = (ai - bi) % p
    return _pf_trim(out)

def _pf_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv_lead = pow(b[-1], p - 2, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        factor = (a[-1] * inv_lead) % p
        q[shift] = factor
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * bi) % p
        _pf_trim(a)
    return _pf_trim(q), a

def _pf_xgcd(a: list[int], b: list[int], p: int):
    # returns (g, s, t) with s*a + t*b = g, g monic or []
    r0, r1 = list(a), list(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _pf_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _pf_sub(s0, _pf_mul(q, s1, p), p)
        t0, t1 = t1, _pf_sub(t0, _pf_mul(q, t1, p), p)
    if r0:
        inv_lead = pow(r0[-1], p - 2, p)
        r0 = [(c * inv_lead) % p for c in r0]
        s0 = [(c * inv_lead) % p for c in s0]
        t0 = [(c * inv_lead) % p for c in t0]
    return r0, s0, t0

def _pf_is_irreducible(f: list[int], p: int) -> bool:
    """Trial-division irreducibility for the desk-scale degrees used here."""
    deg = len(f) - 1
    if deg <= 0:
        return False
    if deg == 1:
        return True
    # divide by every monic polynomial of degree 1 .. deg//2
    for d in range(1, deg // 2 + 1):
        for n in range(p ** d):
            cs = _digits(n, p, d) + [1]
            _, rem = _pf_divmod(f, cs, p)
            if not rem:
                return False
    return True

def _digits(n: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(n % p)
        n //= p
    return out

def _least_irreducible_modulus(p: int, k: int) -> tuple[int, ...]:
    for n in range(p ** k):
        f = _digits(n, p, k) + [1]
        if _pf_is_irreducible(f, p):
            return tuple(f)
    raise RuntimeError(f"no irreducible polynomial of degree {k} over F_{p}")  # unreachable


class PrimeField(Field):
    kind = "prime"

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n: int):
        return n % self.p

    def coerce(self, x) -> int:
        if isinstance(x, int):
            return x % self.p
        raise TypeError(f"cannot interpret {x!r} as an element of {self}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise NotInvertibleError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def eq(self, a, b) -> bool:
        return (a - b) % self.p == 0

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def random_element(self, rng) -> int:
        return rng.randrange(self.p)

    def convert(self, value, src: Field):
        if src == self:
            return value
        if isinstance(src, RationalField):
            num, den = value.numerator, value.denominator
            if den % self.p == 0:
                raise NotInvertibleError(f"denominator {den} not invertible mod {self.p}")
            return (num * pow(den, self.p - 2, self.p)) % self.p
        raise FieldMismatchError(f"no conversion {src} -> {self}")

    def element_to_json(self, a):
        return [a % self.p]

    def element_from_json(self, obj):
        if not (isinstance(obj, list) and len(obj) == 1):
            raise ValueError(f"prime-field coefficient must be a 1-element list, got {obj!r}")
        return obj[0] % self.p

    def to_json(self) -> dict:
        return {"kind": "prime", "p": self.p}

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


class ExtensionField(Field):
    """F_{p^k} with elements stored as length-k residue tuples (little-endian)."""

    kind = "extension"

    def __init__(self, p: int, k: int, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if k < 2:
            raise ValueError("extension degree must be >= 2 (use GF(p) for k=1)")
        if k > 8:
            raise ValueError("extension degree capped at 8")
        self.p = p
        self.k = k
        if modulus is None:
            modulus = _least_irreducible_modulus(p, k)
        else:
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree k")
            if not _pf_is_irreducible(list(modulus), p):
                raise ValueError("modulus is reducible")
        self.modulus = modulus
        self._embeddings: dict = {}

    def zero(self):
        return (0,) * self.k

    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def from_int(self, n: int):
        return (n % self.p,) + (0,) * (self.k - 1)

    def coerce(self, x) -> tuple:
        if isinstance(x, tuple) and len(x) == self.k:
            return tuple(c % self.p for c in x)
        if isinstance(x, int):
            return self.from_int(x)
        raise TypeError(f"cannot interpret {x!r} as an element of {self}")

    def generator(self):
        """The residue class of x (a root of the modulus)."""
        return (0, 1) + (0,) * (self.k - 2)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        prod = _pf_mul(_pf_trim(list(a)), _pf_trim(list(b)), self.p)
        _, rem = _pf_divmod(prod, list(self.modulus), self.p)
        rem = rem + [0] * (self.k - len(rem))
        return tuple(rem)

    def inv(self, a):
        al = _pf_trim(list(a))
        if not al:
            raise NotInvertibleError("inverse of 0")
        g, s, _ = _pf_xgcd(al, list(self.modulus), self.p)
        if len(g) != 1:
            raise NotInvertibleError("element not invertible (modulus reducible?)")
        inv_g = pow(g[0], self.p - 2, self.p)
        s = [(c * inv_g) % self.p for c in s]
        _, rem = _pf_divmod(s, list(self.modulus), self.p)
        rem = rem + [0] * (self.k - len(rem))
        return tuple(rem)

    def is_zero(self, a) -> bool:
        return all(c % self.p == 0 for c in a)

    def eq(self, a, b) -> bool:
        return all((x - y) % self.p == 0 for x, y in zip(a, b))

    def order(self) -> int:
        return self.p ** self.k

    def elements(self) -> Iterator[tuple]:
        for n in range(self.p ** self.k):
            yield tuple(_digits(n, self.p, self.k))

    def random_element(self, rng) -> tuple:
        return tuple(rng.randrange(self.p) for _ in range(self.k))

    def _embedding_root(self, src: "ExtensionField") -> tuple:
        """A root of src's modulus inside this field (first in element order)."""
        key = (src.p, src.k, src.modulus)
        if key in self._embeddings:
            return self._embeddings[key]
        coeffs = [self.from_int(c) for c in src.modulus]
        for cand in self.elements():
            acc = self.zero()
            power = self.one()
            for c in coeffs:
                acc = self.add(acc, self.mul(c, power))
                power = self.mul(power, cand)
            if self.is_zero(acc):
                self._embeddings[key] = cand
                return cand
        raise RuntimeError("no embedding root found (degree does not divide?)")

    def convert(self, value, src: Field):
        if src == self:
            return value
        if isinstance(src, RationalField):
            num, den = value.numerator, value.denominator
            if den % self.p == 0:
                raise NotInvertibleError(f"denominator {den} not invertible mod {self.p}")
            return self.from_int(num * pow(den, self.p - 2, self.p))
        if isinstance(src, PrimeField) and src.p == self.p:
            return self.from_int(value)
        if isinstance(src, ExtensionField) and src.p == self.p and self.k % src.k == 0:
            root = self._embedding_root(src)
            acc = self.zero()
            power = self.one()
            for c in value:
                acc = self.add(acc, self.mul(self.from_int(c), power))
                power = self.mul(power, root)
            return acc
        raise FieldMismatchError(f"no conversion {src} -> {self}")

    def element_str(self, a) -> str:
        return "[" + ",".join(str(c) for c in a) + "]"

    def element_to_json(self, a):
        return list(a)

    def element_from_json(self, obj):
        if not (isinstance(obj, list) and len(obj) == self.k):
            raise ValueError(f"extension coefficient must be a {self.k}-element list, got {obj!r}")
        return tuple(c % self.p for c in obj)

    def to_json(self) -> dict:
        return {"kind": "extension", "p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def __eq__(self, other):
        return (isinstance(other, ExtensionField) and other.p == self.p
                and other.k == self.k and other.modulus == self.modulus)

    def __hash__(self):
        return hash(("GF", self.p, self.k, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.k})"


class ComplexField(Field):
    """Double-precision complex numbers; the inexact numeric backend."""

    kind = "complex"
    exact = False

    def zero(self):
        return 0j

    def one(self):
        return 1 + 0j

    def from_int(self, n: int):
        return complex(n)

    def coerce(self, x) -> complex:
        if isinstance(x, complex):
            return x
        if isinstance(x, (int, float)):
            return complex(x)
        if isinstance(x, Fraction):
            return complex(float(x))
        raise TypeError(f"cannot interpret {x!r} as a complex number")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise NotInvertibleError("inverse of 0")
        return 1 / a

    def is_zero(self, a) -> bool:
        # exact zero only; tolerance decisions belong to callers
        return a == 0

    def eq(self, a, b) -> bool:
        return a == b

    def convert(self, value, src: Field):
        if src == self:
            return value
        if isinstance(src, RationalField):
            return complex(value.numerator / value.denominator)
        raise FieldMismatchError(f"no conversion {src} -> CC")

    def element_to_json(self, a):
        raise ValueError("numeric complex values are not serialized")

    def element_from_json(self, obj):
        raise ValueError("numeric complex values are not serialized")

    def to_json(self) -> dict:
        return {"kind": "complex"}

    def __eq__(self, other):
        return isinstance(other, ComplexField)

    def __hash__(self):
        return hash("CC")

    def __repr__(self):
        return "CC"


QQ = RationalField()
CC = ComplexField()


@functools.lru_cache(maxsize=None)
def GF(p: int, k: int = 1) -> Field:
    """Finite field with p^k elements (deterministic modulus for k >= 2)."""
    if k == 1:
        return PrimeField(p)
    return ExtensionField(p, k)


def field_from_json(obj: dict) -> Field:
    kind = obj.get("kind")
    if kind == "rational":
        return QQ
    if kind == "prime":
        return GF(obj["p"])
    if kind == "extension":
        f = GF(obj["p"], obj["k"])
        if list(f.modulus) != list(obj["modulus"]):
            return ExtensionField(obj["p"], obj["k"], tuple(obj["modulus"]))
        return f
    if kind == "complex":
        return CC
    raise ValueError(f"unknown field descriptor {obj!r}")
