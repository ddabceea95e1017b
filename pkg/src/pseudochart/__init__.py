"""Explicit polynomial charts of rational varieties with exact rational
coefficients: constructions, verification evidence, and obstruction
verdicts for affine surfaces."""

__version__ = "0.1.0"
