"""Exact scalar and sparse multivariate polynomial arithmetic."""

from .fields import (
    CC,
    GF,
    QQ,
    ComplexField,
    ExtensionField,
    Field,
    FieldMismatchError,
    NotInvertibleError,
    PrimeField,
    RationalField,
    field_from_json,
    is_prime,
)
from .poly import (
    MultiPoly,
    VariableMismatchError,
    poly_arith,
    poly_from_json,
    to_complex_coeffs,
    univariate_coeffs,
)
from .resultant import bareiss_determinant, exact_divide, resultant, sylvester_matrix
from .roots import (
    NumericRootError,
    ZeroPolynomialError,
    complex_roots,
    complex_roots_from_coeffs,
    finite_field_roots,
    univariate_roots,
)
from .elimination import (
    EMPTY,
    INCONCLUSIVE,
    UNCONSTRAINED,
    WITNESS,
    EliminationOutcome,
    certify_no_common_zero,
    rational_roots_with_completeness,
    search_witness,
    unconstrained_vars,
)

__all__ = [
    "CC", "GF", "QQ", "ComplexField", "ExtensionField", "Field",
    "FieldMismatchError", "NotInvertibleError", "PrimeField", "RationalField",
    "field_from_json", "is_prime",
    "MultiPoly", "VariableMismatchError", "poly_arith", "poly_from_json",
    "to_complex_coeffs", "univariate_coeffs",
    "bareiss_determinant", "exact_divide", "resultant", "sylvester_matrix",
    "NumericRootError", "ZeroPolynomialError", "complex_roots",
    "complex_roots_from_coeffs", "finite_field_roots", "univariate_roots",
    "EMPTY", "INCONCLUSIVE", "UNCONSTRAINED", "WITNESS", "EliminationOutcome",
    "certify_no_common_zero", "rational_roots_with_completeness",
    "search_witness", "unconstrained_vars",
]
