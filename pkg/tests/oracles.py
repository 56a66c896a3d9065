"""Independent reference computations used by the tests."""
from __future__ import annotations

from lcsreduce.forms import DifferentialForm, VectorField, exterior_derivative, wedge


def lie_derivative_generators(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    """``L_X`` as the derivation with ``L_X f = X(f)`` and ``L_X dx^i = d(X^i)``,
    expanded over the basis monomials of ``a`` (no interior products)."""
    chart = a.chart
    out = DifferentialForm.zero(chart, a.degree)
    for idx, c in a.terms.items():
        basis = [DifferentialForm.basis(chart, chart.coords[i]) for i in idx]
        out = out + _monomial(chart, basis) * X.apply(c)
        for j in range(len(idx)):
            factors = list(basis)
            factors[j] = exterior_derivative(DifferentialForm.function(chart, X[idx[j]]))
            out = out + _monomial(chart, factors) * c
    return out


def _monomial(chart, factors):
    out = DifferentialForm.function(chart, 1)
    for f in factors:
        out = wedge(out, f)
    return out


def to_sympy(e):
    """Convert through the printed form; independent of the engine's internals."""
    import sympy
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    names = {n: sympy.Symbol(n) for n in e.vars}
    names.update(ln=sympy.log, exp=sympy.exp, sin=sympy.sin, cos=sympy.cos)
    return parse_expr(str(e), local_dict=names,
                      transformations=standard_transformations + (convert_xor,))


def sympy_equal(a, b) -> bool:
    import sympy

    return sympy.simplify(sympy.expand(a - b)) == 0
