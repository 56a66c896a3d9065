"""Exact antiderivatives, unit-interval integrals and circle means.

The integrable class in a variable ``v`` is spanned by monomials
``C * v^n * exp(a*v + r) * trig(b*v + s)`` with ``n >= 0``, rational ``a, b``
and ``C, r, s`` free of ``v``; it is closed under ``+`` and ``*``.
"""
from __future__ import annotations

from fractions import Fraction

from .expr import (ONE, ZERO, Expr, Mono, _VAR, cos, differentiate, exp,
                   linear_coefficient, sin, substitute, var)
from .zero import SamplePlan, is_zero


class NotInIntegrableClass(ValueError):
    def __init__(self, subtree: str, variable: str):
        super().__init__(f"{subtree} is outside the integrable class in {variable}")
        self.subtree = subtree
        self.variable = variable


class NotTrigPolynomial(ValueError):
    def __init__(self, subtree: str, variable: str):
        super().__init__(f"{subtree} is not a trigonometric polynomial in {variable}")
        self.subtree = subtree
        self.variable = variable


def _split(m: Mono, c: Fraction, v: str):
    """Split a monomial into (v-free coefficient, power of v, base) where the
    base carries the exp/trig factors that depend on ``v``."""
    n = 0
    free = []
    for a, k in m.factors:
        if v not in a.vars:
            free.append((a, k))
        elif a.kind == _VAR and k > 0:
            n = k
        else:
            raise NotInIntegrableClass(a.render(k), v)
    ex, trig = m.exp, m.trig
    if ex is not None and v in ex.vars:
        if linear_coefficient(ex, v) is None:
            raise NotInIntegrableClass(f"exp({ex})", v)
        base_exp, ex = ex, None
    else:
        base_exp = None
    if trig is not None and v in trig[1].vars:
        if linear_coefficient(trig[1], v) is None:
            raise NotInIntegrableClass(f"{trig[0]}({trig[1]})", v)
        base_trig, trig = trig, None
    else:
        base_trig = None
    coeff = Expr._mono(Mono(tuple(free), ex, trig), c)
    base = ONE
    if base_exp is not None:
        base = base * exp(base_exp)
    if base_trig is not None:
        base = base * (sin if base_trig[0] == "sin" else cos)(base_trig[1])
    return coeff, n, base


def _base_primitive(base: Expr, v: str) -> Expr:
    """Primitive of ``exp(a v + r) * trig(b v + s)`` (either factor optional)."""
    if base.constant_value() is not None:
        return base * var(v)
    (m, c), = base.terms
    a = linear_coefficient(m.exp, v)[0] if m.exp is not None and v in m.exp.vars else Fraction(0)
    if m.trig is None or v not in m.trig[1].vars:
        return base.scale(1 / a)
    kind, arg = m.trig
    b = linear_coefficient(arg, v)[0]
    rest = Expr._mono(Mono(m.factors, m.exp, None), c)
    s, co = sin(arg), cos(arg)
    if kind == "sin":
        lin = s.scale(a) - co.scale(b)
    else:
        lin = co.scale(a) + s.scale(b)
    return rest * lin.scale(1 / (a * a + b * b))


def _integrate(e: Expr, v: str) -> Expr:
    out = ZERO
    for m, c in e.terms:
        coeff, n, base = _split(m, c, v)
        if base.constant_value() is not None:
            out = out + coeff * var(v) ** (n + 1) * base.scale(Fraction(1, n + 1))
            continue
        # integration by parts: int v^n g = v^n G - n int v^(n-1) G
        prim = _base_primitive(base, v)
        term = var(v) ** n * prim
        if n:
            term = term - _integrate(var(v) ** (n - 1) * prim, v).scale(n)
        out = out + coeff * term
    return out


def antiderivative(e: Expr, v: str, plan: SamplePlan | None = None) -> Expr:
    """Primitive ``F`` of ``e`` in ``v`` with ``F|_{v=0} = 0``; the identity
    ``dF/dv = e`` is re-checked before returning."""
    if v not in e.vars:
        return e * var(v)
    F = _integrate(e, v)
    F = F - substitute(F, {v: ZERO})
    residual = differentiate(F, v) - e
    if not is_zero(residual, plan).is_zero:
        raise ArithmeticError(f"antiderivative check failed for {e} in {v}")
    return F


def integrate_unit_interval(e: Expr, t: str, plan: SamplePlan | None = None) -> Expr:
    """Exact value of the integral of ``e`` over ``t`` in [0, 1]."""
    F = antiderivative(e, t, plan)
    return substitute(F, {t: ONE})


def circle_mean(e: Expr, theta: str) -> Expr:
    """Mean of ``e`` over ``theta`` in [0, 2*pi); ``e`` must be a finite sum of
    ``theta``-free terms and terms ``c * sin(k*theta + s)``, ``c * cos(k*theta + s)``
    with nonzero integer ``k``."""
    out = ZERO
    for m, c in e.terms:
        if theta not in m.vars:
            out = out + Expr._mono(m, c)
            continue
        bad = [a.render(k) for a, k in m.factors if theta in a.vars]
        if bad:
            raise NotTrigPolynomial(bad[0], theta)
        if m.exp is not None and theta in m.exp.vars:
            raise NotTrigPolynomial(f"exp({m.exp})", theta)
        lc = linear_coefficient(m.trig[1], theta)
        if lc is None or lc[0].denominator != 1:
            raise NotTrigPolynomial(f"{m.trig[0]}({m.trig[1]})", theta)
        # mean of a pure harmonic is zero
    return out
