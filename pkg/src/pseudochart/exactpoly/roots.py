"""Univariate root finding: exhaustive finite-field scans and a
Durand-Kerner simultaneous complex iteration.

The finite-field backend enumerates the stated field and reports exact
roots with multiplicities (by synthetic deflation).  The complex backend
runs a simultaneous iteration on all roots at once, then merges clusters
closer than the separation threshold and keeps only roots whose residual
is small relative to the coefficient magnitude.  The fiber polynomials
this package produces have degree <= 48 with well-separated roots at
random targets, which is comfortably inside Durand-Kerner territory.
"""

from __future__ import annotations

import cmath

from .fields import Field
from .poly import MultiPoly, to_complex_coeffs, univariate_coeffs

DEFAULT_TOL = 1e-9        # relative residual acceptance
DEFAULT_MERGE = 1e-6      # cluster-merge separation
MAX_ITERATIONS = 2000


class ZeroPolynomialError(ValueError):
    """The zero polynomial has the whole line as its root set; upstream
    this signals a positive-dimensional fiber."""


class NumericRootError(RuntimeError):
    """The simultaneous iteration failed to converge."""


def _active_var(p: MultiPoly) -> str | None:
    occ = p.occurring_vars()
    if len(occ) > 1:
        raise ValueError(f"polynomial is not univariate: variables {occ}")
    return occ[0] if occ else None


def finite_field_roots(p: MultiPoly, field: Field | None = None) -> list[tuple[object, int]]:
    """All roots of p in the given finite field (default: its own), with
    multiplicities from synthetic deflation."""
    if p.is_zero:
        raise ZeroPolynomialError("root set of the zero polynomial is the whole line")
    f = field if field is not None else p.field
    if not hasattr(f, "elements"):
        raise ValueError(f"{f} is not enumerable; use the complex backend")
    var = _active_var(p)
    if var is None:
        return []
    coeffs = univariate_coeffs(p, var)
    if f != p.field:
        coeffs = [f.convert(c, p.field) for c in coeffs]
    roots = []
    for cand in f.elements():
        acc = f.zero()
        for c in reversed(coeffs):
            acc = f.add(f.mul(acc, cand), c)
        if f.is_zero(acc):
            mult = 0
            work = coeffs
            while True:
                quot, rem = _synthetic_divide(work, cand, f)
                if not f.is_zero(rem):
                    break
                mult += 1
                work = quot
                if len(work) <= 1:
                    break
            roots.append((cand, mult))
    return roots


def _synthetic_divide(coeffs: list, root, f: Field):
    """Divide by (x - root); returns (quotient coeffs, remainder)."""
    acc = f.zero()
    out = []
    for c in reversed(coeffs):
        acc = f.add(f.mul(acc, root), c)
        out.append(acc)
    rem = out.pop()
    out.reverse()
    return out, rem


def complex_roots(p: MultiPoly, tol: float = DEFAULT_TOL,
                  merge: float = DEFAULT_MERGE) -> list[tuple[complex, int]]:
    """All complex roots with multiplicities (cluster-merged)."""
    if p.is_zero:
        raise ZeroPolynomialError("root set of the zero polynomial is the whole line")
    var = _active_var(p)
    if var is None:
        return []
    coeffs = to_complex_coeffs(p, var)
    return complex_roots_from_coeffs(coeffs, tol=tol, merge=merge)


def complex_roots_from_coeffs(coeffs: list[complex], tol: float = DEFAULT_TOL,
                              merge: float = DEFAULT_MERGE) -> list[tuple[complex, int]]:
    coeffs = list(coeffs)
    while coeffs and abs(coeffs[-1]) == 0:
        coeffs.pop()
    if not coeffs:
        raise ZeroPolynomialError("root set of the zero polynomial is the whole line")
    deg = len(coeffs) - 1
    if deg == 0:
        return []
    # factor out roots at the origin exactly
    zero_mult = 0
    while abs(coeffs[0]) == 0:
        coeffs.pop(0)
        zero_mult += 1
    raw = list(_durand_kerner(coeffs)) if len(coeffs) > 1 else []
    clusters = _merge_clusters(raw, merge)
    scale = max(abs(c) for c in coeffs)
    accepted = []
    for center, mult in clusters:
        residual = abs(_horner(coeffs, center))
        bound = tol * scale * max(1.0, abs(center)) ** (len(coeffs) - 1) * len(coeffs)
        if residual <= max(bound, tol * scale) * 1e3:
            accepted.append((center, mult))
        else:
            raise NumericRootError(
                f"root candidate {center} rejected: residual {residual:.3e} vs scale {scale:.3e}")
    if zero_mult:
        accepted.append((0j, zero_mult))
    accepted.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return accepted


def _horner(coeffs: list[complex], x: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _durand_kerner(coeffs: list[complex]) -> list[complex]:
    n = len(coeffs) - 1
    if n == 1:
        return [-coeffs[0] / coeffs[1]]
    lead = coeffs[-1]
    monic = [c / lead for c in coeffs]
    radius = 1.0 + max(abs(c) for c in monic[:-1])
    seed = 0.4 + 0.9j
    xs = [radius * seed ** (k + 1) / abs(seed ** (k + 1)) * cmath.exp(2j * cmath.pi * k / n)
          for k in range(n)]
    for _ in range(MAX_ITERATIONS):
        max_step = 0.0
        for i in range(n):
            num = _horner(monic, xs[i])
            den = 1 + 0j
            for j in range(n):
                if j != i:
                    den *= (xs[i] - xs[j])
            if den == 0:
                xs[i] += (1e-8 + 1e-8j) * (i + 1)
                max_step = 1.0
                continue
            step = num / den
            xs[i] -= step
            rel = abs(step) / max(1.0, abs(xs[i]))
            if rel > max_step:
                max_step = rel
        if max_step < 1e-14:
            return xs
    # accept slow (multiple-root) convergence if the final steps are tiny
    if max_step < 1e-6:
        return xs
    raise NumericRootError(f"Durand-Kerner did not converge (last relative step {max_step:.3e})")


def _merge_clusters(roots: list[complex], merge: float) -> list[tuple[complex, int]]:
    pending = list(roots)
    clusters: list[list[complex]] = []
    for r in pending:
        placed = False
        for cl in clusters:
            center = sum(cl) / len(cl)
            if abs(r - center) < merge * max(1.0, abs(center)):
                cl.append(r)
                placed = True
                break
        if not placed:
            clusters.append([r])
    return [(sum(cl) / len(cl), len(cl)) for cl in clusters]


def univariate_roots(p: MultiPoly, backend: str = "finite_field_exhaustive",
                     field: Field | None = None) -> list[tuple[object, int]]:
    """Root finding dispatcher.

    ``finite_field_exhaustive`` scans the stated finite field (p's own by
    default, or an explicit extension); ``complex_numeric`` runs the
    simultaneous iteration.
    """
    if backend == "finite_field_exhaustive":
        return finite_field_roots(p, field)
    if backend == "complex_numeric":
        return complex_roots(p)
    raise ValueError(f"unknown backend {backend!r}")
