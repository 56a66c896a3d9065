"""Scalar-field ring: canonical expressions, parser, calculus and zero testing."""
from .calculus import (NotInIntegrableClass, NotTrigPolynomial, antiderivative,
                       circle_mean, integrate_unit_interval)
from .expr import (ONE, ZERO, Expr, as_expr, const, cos, differentiate, exp, ln,
                   reciprocal, sin, substitute, var)
from .parser import ParseError, UndeclaredVariable, parse, parse_form
from .zero import (EvaluationError, SamplePlan, Tier, ZeroVerdict, evaluate_at,
                   is_nonzero_everywhere, is_zero)

__all__ = [
    "Expr", "ONE", "ZERO", "as_expr", "const", "var", "exp", "ln", "sin", "cos",
    "reciprocal", "differentiate", "substitute", "antiderivative",
    "integrate_unit_interval", "circle_mean", "NotInIntegrableClass",
    "NotTrigPolynomial", "parse", "parse_form", "ParseError", "UndeclaredVariable",
    "SamplePlan", "Tier", "ZeroVerdict", "is_zero", "is_nonzero_everywhere",
    "evaluate_at", "EvaluationError",
]
