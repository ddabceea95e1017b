"""Resultants via Sylvester matrices and fraction-free Bareiss elimination.

The Sylvester matrix of two polynomials in a chosen variable has entries
that are themselves polynomials in the remaining variables.  Its
determinant (the resultant) vanishes at a specialization of those
variables exactly when the two polynomials share a root there over the
algebraic closure, or both leading coefficients vanish.  Crucially for
the certificates built on top of this module, the resultant lies in the
ideal generated by its two inputs, so it vanishes at every common zero.

Bareiss elimination keeps every intermediate entry in the polynomial ring
(all divisions are exact), avoiding the coefficient blow-up of naive
fraction arithmetic without any modular reconstruction machinery.
"""

from __future__ import annotations

from .poly import MultiPoly


def exact_divide(num: MultiPoly, den: MultiPoly) -> MultiPoly:
    """Quotient num/den when the division is exact; raises otherwise."""
    if den.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero:
        return num
    num._check_compatible(den)
    f = num.field
    den_lead_exp, den_lead_c = den.terms[0]
    quotient_terms = []
    rem = num
    while not rem.is_zero:
        lead_exp, lead_c = rem.terms[0]
        q_exp = tuple(a - b for a, b in zip(lead_exp, den_lead_exp))
        if any(e < 0 for e in q_exp):
            raise ArithmeticError("inexact polynomial division (leading-term mismatch)")
        q_c = f.div(lead_c, den_lead_c)
        quotient_terms.append((q_exp, q_c))
        rem = rem - den * MultiPoly(f, num.vars, [(q_exp, q_c)])
    return MultiPoly(f, num.vars, quotient_terms)


def bareiss_determinant(matrix: list[list[MultiPoly]]) -> MultiPoly:
    """Determinant of a square matrix of polynomials (exact field)."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    sample = matrix[0][0]
    if not sample.field.exact:
        raise ValueError("Bareiss elimination needs an exact field")
    one = MultiPoly.constant(sample.field, sample.vars, sample.field.one())
    m = [row[:] for row in matrix]
    sign = 1
    prev = one
    for k in range(n - 1):
        if m[k][k].is_zero:
            pivot_row = next((i for i in range(k + 1, n) if not m[i][k].is_zero), None)
            if pivot_row is None:
                return MultiPoly.zero(sample.field, sample.vars)
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = exact_divide(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev)
            m[i][k] = MultiPoly.zero(sample.field, sample.vars)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def sylvester_matrix(p: MultiPoly, q: MultiPoly, var: str) -> list[list[MultiPoly]]:
    p._check_compatible(q)
    m = p.degree_in(var)
    n = q.degree_in(var)
    if m == 0 or n == 0:
        raise ValueError("Sylvester matrix needs positive degree in the variable on both sides")
    pc = [p.coefficient_of(var, m - i) for i in range(m + 1)]   # descending
    qc = [q.coefficient_of(var, n - i) for i in range(n + 1)]
    size = m + n
    zero = MultiPoly.zero(p.field, p.vars)
    rows = []
    for shift in range(n):
        rows.append([zero] * shift + pc + [zero] * (size - m - 1 - shift))
    for shift in range(m):
        rows.append([zero] * shift + qc + [zero] * (size - n - 1 - shift))
    return rows


def resultant(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    """Resultant of p and q with respect to ``var``.

    Degenerate degrees follow the usual conventions: if one polynomial
    has degree 0 in ``var``, the resultant is that polynomial raised to
    the other's degree.  Both inputs must be nonzero, and ``var`` must
    occur in at least one of them.
    """
    if p.is_zero or q.is_zero:
        raise ValueError("resultant of the zero polynomial")
    p._check_compatible(q)
    m = p.degree_in(var)
    n = q.degree_in(var)
    if m == 0 and n == 0:
        raise ValueError(f"variable {var!r} occurs in neither polynomial")
    if m == 0:
        return p ** n
    if n == 0:
        return q ** m
    return bareiss_determinant(sylvester_matrix(p, q, var))
