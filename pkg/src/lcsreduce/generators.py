"""Seeded random expressions, forms, vector fields and maps for property checks.

Everything takes a :class:`random.Random` so the same seed reproduces the same
instance. Expressions stay in the class the engine is closed under:
polynomials times ``exp(linear)`` times ``sin/cos(integer-linear)``.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .forms import Chart, DifferentialForm, SmoothMap, VectorField
from .symbolic import ONE, ZERO, Expr, const, cos, exp, sin, var


def random_linear(rng: random.Random, names: Sequence[str], integer: bool = False) -> Expr:
    out = ZERO
    for n in rng.sample(list(names), k=min(len(names), rng.randint(1, 2))):
        c = rng.choice([-2, -1, 1, 2]) if integer else Fraction(rng.choice([-2, -1, 1, 2]),
                                                               rng.choice([1, 2]))
        out = out + const(c) * var(n)
    return out


def random_monomial(rng: random.Random, names: Sequence[str], max_vars: int = 2,
                    max_power: int = 2) -> Expr:
    out = ONE
    for n in rng.sample(list(names), k=rng.randint(0, min(max_vars, len(names)))):
        out = out * var(n) ** rng.randint(1, max_power)
    return out


def random_expr(rng: random.Random, names: Sequence[str], terms: int = 2,
                transcendental: bool = True) -> Expr:
    """Sum of up to ``terms`` terms ``c * monomial [* exp(lin)] [* sin|cos(lin)]``."""
    out = ZERO
    for _ in range(rng.randint(1, terms)):
        t = const(Fraction(rng.randint(-3, 3) or 1, rng.choice([1, 1, 2, 3])))
        t = t * random_monomial(rng, names)
        if transcendental and rng.random() < 0.25:
            t = t * exp(random_linear(rng, names))
        if transcendental and rng.random() < 0.25:
            t = t * rng.choice([sin, cos])(random_linear(rng, names, integer=True))
        out = out + t
    return out


def random_form(rng: random.Random, chart: Chart, degree: int, terms: int = 2,
                transcendental: bool = True) -> DifferentialForm:
    keys = list(combinations(range(chart.dim), degree))
    picked = rng.sample(keys, k=min(len(keys), rng.randint(1, terms)))
    return DifferentialForm(chart, degree, {k: random_expr(rng, chart.coords, 2, transcendental)
                                            for k in picked})


def random_field(rng: random.Random, chart: Chart, density: float = 0.5) -> VectorField:
    comps = [random_expr(rng, chart.coords, 2) if rng.random() < density else ZERO
             for _ in chart.coords]
    return VectorField(chart, comps)


def random_map(rng: random.Random, source: Chart, target: Chart) -> SmoothMap:
    """Polynomial map; component i is a source coordinate plus a small polynomial."""
    comps = []
    for i in range(target.dim):
        base = var(source.coords[i % source.dim])
        if rng.random() < 0.5:
            base = base + random_expr(rng, source.coords, 1, transcendental=False)
        comps.append(base)
    return SmoothMap(source, target, comps)


def random_leafwise_form(rng: random.Random, chart: Chart, leaves: Sequence[str],
                         degree: int) -> DifferentialForm:
    """A form whose every term carries at least one transverse index."""
    leaf = {chart.index(n) for n in leaves}
    keys = [k for k in combinations(range(chart.dim), degree) if not set(k) <= leaf]
    if not keys:
        return DifferentialForm.zero(chart, degree)
    picked = rng.sample(keys, k=min(len(keys), rng.randint(1, 3)))
    return DifferentialForm(chart, degree, {k: random_expr(rng, chart.coords, 2) for k in picked})


__all__ = ["random_linear", "random_monomial", "random_expr", "random_form", "random_field",
           "random_map", "random_leafwise_form"]
