"""Differential forms, vector fields and smooth maps on coordinate charts."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .symbolic import (ONE, ZERO, Expr, SamplePlan, as_expr, differentiate,
                       integrate_unit_interval, is_zero, substitute, var)
from .symbolic.zero import ZeroVerdict

MAX_DIMENSION = 10


class ChartMismatch(ValueError):
    pass


class ChartTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Ordered coordinates; names in ``periodic`` live on a circle of length 2*pi."""

    coords: tuple[str, ...]
    periodic: frozenset = field(default_factory=frozenset)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "periodic", frozenset(self.periodic))
        if not self.coords:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"duplicate coordinate names in {self.coords}")
        if len(self.coords) > MAX_DIMENSION:
            raise ChartTooLarge(f"chart dimension {len(self.coords)} exceeds {MAX_DIMENSION}")
        unknown = self.periodic - set(self.coords)
        if unknown:
            raise ValueError(f"periodic flags for unknown coordinates {sorted(unknown)}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, name: str) -> int:
        try:
            return self.coords.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a coordinate of chart {self.coords}") from None

    def var(self, name: str) -> Expr:
        self.index(name)
        return var(name)

    def vars(self) -> list[Expr]:
        return [var(c) for c in self.coords]

    def plan(self, plan: SamplePlan | None = None) -> SamplePlan:
        return (plan or SamplePlan()).for_chart(self)

    def check_expr(self, e: Expr) -> Expr:
        extra = e.vars - set(self.coords)
        if extra:
            raise ValueError(f"{e} uses coordinates {sorted(extra)} not on chart {self.coords}")
        return e

    def restrict(self, keep: Sequence[str], name: str = "") -> Chart:
        return Chart(tuple(keep), self.periodic & set(keep), name)


def sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``idx`` and the sorted tuple; sign 0 on repeats."""
    arr = list(idx)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
            elif arr[j] == arr[j + 1]:
                return 0, ()
    return sign, tuple(arr)


def _same_chart(*objs):
    c = objs[0].chart
    for o in objs[1:]:
        if o.chart != c:
            raise ChartMismatch(f"chart {o.chart.coords} differs from {c.coords}")
    return c


class DifferentialForm:
    """A degree-``p`` form: strictly increasing multi-index -> nonzero coefficient."""

    __slots__ = ("chart", "degree", "terms")

    def __init__(self, chart: Chart, degree: int, terms: Mapping | Iterable = ()):
        if degree < 0:
            raise ValueError("negative form degree")
        self.chart = chart
        self.degree = degree
        acc: dict[tuple[int, ...], Expr] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for idx, coeff in items:
            idx = tuple(chart.index(i) if isinstance(i, str) else i for i in idx)
            if len(idx) != degree:
                raise ValueError(f"multi-index {idx} in a {degree}-form")
            sign, key = sort_sign(idx)
            if not sign:
                continue
            coeff = as_expr(coeff)
            acc[key] = acc.get(key, ZERO) + (coeff if sign > 0 else -coeff)
        self.terms = {k: chart.check_expr(v) for k, v in sorted(acc.items()) if not v.is_zero_literal()}

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart, degree: int) -> DifferentialForm:
        return cls(chart, degree)

    @classmethod
    def function(cls, chart: Chart, f) -> DifferentialForm:
        return cls(chart, 0, {(): as_expr(f)})

    @classmethod
    def basis(cls, chart: Chart, *names: str) -> DifferentialForm:
        """``d<names[0]> ^ d<names[1]> ^ ...``."""
        return cls(chart, len(names), {tuple(chart.index(n) for n in names): ONE})

    # -- access -----------------------------------------------------------
    def __getitem__(self, idx) -> Expr:
        if isinstance(idx, (int, str)):
            idx = (idx,)
        idx = tuple(self.chart.index(i) if isinstance(i, str) else i for i in idx)
        sign, key = sort_sign(idx)
        if not sign:
            return ZERO
        c = self.terms.get(key, ZERO)
        return c if sign > 0 else -c

    def coefficient(self, *names: str) -> Expr:
        return self[tuple(names)]

    def names(self, idx: tuple[int, ...]) -> tuple[str, ...]:
        return tuple(self.chart.coords[i] for i in idx)

    def is_zero_literal(self) -> bool:
        return not self.terms

    def map_coefficients(self, fn) -> DifferentialForm:
        return DifferentialForm(self.chart, self.degree, {k: fn(v) for k, v in self.terms.items()})

    def zero_verdicts(self, plan: SamplePlan | None = None) -> dict[tuple[int, ...], ZeroVerdict]:
        plan = self.chart.plan(plan)
        return {k: is_zero(v, plan) for k, v in self.terms.items()}

    def is_zero(self, plan: SamplePlan | None = None) -> bool:
        return all(v.is_zero for v in self.zero_verdicts(plan).values())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for idx, c in self.terms.items():
            basis = "^".join("d" + n for n in self.names(idx))
            if not basis:
                parts.append(f"({c})")
            elif c == 1:
                parts.append(basis)
            else:
                parts.append(f"({c})*{basis}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DifferentialForm<{self.degree}>({self})"

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return (self.chart == other.chart and self.degree == other.degree
                and self.terms == other.terms)

    __hash__ = None

    # -- linear structure -------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, DifferentialForm):
            if isinstance(other, (Expr, int, Fraction)) and self.degree == 0:
                other = DifferentialForm.function(self.chart, other)
            else:
                return NotImplemented
        _same_chart(self, other)
        if other.degree != self.degree and other.terms and self.terms:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        degree = self.degree if self.terms else other.degree
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, ZERO) + v
        return DifferentialForm(self.chart, degree, acc)

    def __radd__(self, other):
        if isinstance(other, (Expr, int, Fraction)):
            if as_expr(other).is_zero_literal():
                return self
            return DifferentialForm.function(self.chart, other) + self
        return NotImplemented

    def __neg__(self):
        return DifferentialForm(self.chart, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, DifferentialForm):
            return self + (-other)
        return self + (-as_expr(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, DifferentialForm):
            return wedge(self, other)
        f = as_expr(other)
        return DifferentialForm(self.chart, self.degree, {k: v * f for k, v in self.terms.items()})

    def __rmul__(self, other):
        f = as_expr(other)
        return DifferentialForm(self.chart, self.degree, {k: f * v for k, v in self.terms.items()})

    def __truediv__(self, other):
        f = as_expr(other)
        return DifferentialForm(self.chart, self.degree, {k: v / f for k, v in self.terms.items()})

    def __xor__(self, other):
        return wedge(self, other)


class VectorField:
    """A vector field given by one coefficient per coordinate."""

    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Sequence | Mapping):
        if isinstance(components, Mapping):
            comps = [ZERO] * chart.dim
            for k, v in components.items():
                comps[chart.index(k) if isinstance(k, str) else k] = as_expr(v)
        else:
            comps = [as_expr(c) for c in components]
        if len(comps) != chart.dim:
            raise ValueError(f"{len(comps)} components for a {chart.dim}-dimensional chart")
        self.chart = chart
        self.components = tuple(chart.check_expr(c) for c in comps)

    @classmethod
    def coordinate(cls, chart: Chart, name: str) -> VectorField:
        return cls(chart, {name: ONE})

    @classmethod
    def zero(cls, chart: Chart) -> VectorField:
        return cls(chart, [ZERO] * chart.dim)

    def __getitem__(self, i):
        if isinstance(i, str):
            i = self.chart.index(i)
        return self.components[i]

    def apply(self, f: Expr) -> Expr:
        """Directional derivative ``X(f)``."""
        out = ZERO
        for name, c in zip(self.chart.coords, self.components):
            if c.terms and name in f.vars:
                out = out + c * differentiate(f, name)
        return out

    def is_zero_literal(self) -> bool:
        return all(c.is_zero_literal() for c in self.components)

    def __add__(self, other):
        _same_chart(self, other)
        return VectorField(self.chart, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        _same_chart(self, other)
        return VectorField(self.chart, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return VectorField(self.chart, [-a for a in self.components])

    def __rmul__(self, f):
        f = as_expr(f)
        return VectorField(self.chart, [f * a for a in self.components])

    __mul__ = __rmul__

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.chart == other.chart and self.components == other.components

    __hash__ = None

    def __str__(self):
        parts = [f"d/d{n}" if c == 1 else f"({c})*d/d{n}"
                 for n, c in zip(self.chart.coords, self.components) if c.terms]
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


class SmoothMap:
    """``phi: source -> target`` with one source expression per target coordinate."""

    __slots__ = ("source", "target", "components", "_jac")

    def __init__(self, source: Chart, target: Chart, components: Sequence | Mapping):
        if isinstance(components, Mapping):
            components = [components[n] for n in target.coords]
        comps = tuple(as_expr(c) for c in components)
        if len(comps) != target.dim:
            raise ValueError(f"{len(comps)} components for a {target.dim}-dimensional target")
        self.source = source
        self.target = target
        self.components = tuple(source.check_expr(c) for c in comps)
        self._jac = None

    @classmethod
    def identity(cls, chart: Chart) -> SmoothMap:
        return cls(chart, chart, chart.vars())

    def mapping(self) -> dict[str, Expr]:
        return dict(zip(self.target.coords, self.components))

    def jacobian(self) -> list[list[Expr]]:
        """``J[i][j] = d phi^i / d x^j`` (target row, source column)."""
        if self._jac is None:
            self._jac = [[differentiate(c, s) for s in self.source.coords] for c in self.components]
        return self._jac

    def pull(self, f: Expr) -> Expr:
        """``f o phi`` for a scalar on the target chart."""
        return substitute(f, self.mapping())

    def push(self, X: VectorField) -> list[Expr]:
        """Components of ``D phi (X)`` in target coordinates, as source expressions."""
        J = self.jacobian()
        return [sum((J[i][j] * X.components[j] for j in range(self.source.dim)), ZERO)
                for i in range(self.target.dim)]

    def compose(self, inner: SmoothMap) -> SmoothMap:
        """``self o inner``."""
        if inner.target != self.source:
            raise ChartMismatch("composition of maps with incompatible charts")
        return SmoothMap(inner.source, self.target, [inner.pull(c) for c in self.components])

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


# -- operations ---------------------------------------------------------------

def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    chart = _same_chart(a, b)
    degree = a.degree + b.degree
    if degree > chart.dim:
        return DifferentialForm.zero(chart, degree)
    acc = []
    for i, ca in a.terms.items():
        for j, cb in b.terms.items():
            if set(i) & set(j):
                continue
            acc.append((i + j, ca * cb))
    return DifferentialForm(chart, degree, acc)


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    chart = a.chart
    acc = []
    for idx, c in a.terms.items():
        for j, name in enumerate(chart.coords):
            if j in idx or name not in c.vars:
                continue
            acc.append(((j,) + idx, differentiate(c, name)))
    return DifferentialForm(chart, a.degree + 1, acc)


d = exterior_derivative


def interior_product(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    chart = _same_chart(X, a)
    if a.degree == 0:
        raise ValueError("interior product of a 0-form is undefined")
    acc = []
    for idx, c in a.terms.items():
        for k, i in enumerate(idx):
            xi = X.components[i]
            if xi.is_zero_literal():
                continue
            coeff = xi * c
            acc.append((idx[:k] + idx[k + 1:], coeff if k % 2 == 0 else -coeff))
    return DifferentialForm(chart, a.degree - 1, acc)


def pullback(phi: SmoothMap, a: DifferentialForm) -> DifferentialForm:
    if a.chart != phi.target:
        raise ChartMismatch("form does not live on the map's target chart")
    src = phi.source
    J = phi.jacobian()
    one_forms = [DifferentialForm(src, 1, {(j,): J[i][j] for j in range(src.dim)})
                 for i in range(phi.target.dim)]
    mapping = phi.mapping()
    out = DifferentialForm.zero(src, a.degree)
    for idx, c in a.terms.items():
        piece = DifferentialForm.function(src, substitute(c, mapping))
        for i in idx:
            piece = wedge(piece, one_forms[i])
            if not piece.terms:
                break
        out = out + piece
    return out


def lie_derivative(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Cartan's formula ``d(X _| a) + X _| da``."""
    _same_chart(X, a)
    da = exterior_derivative(a)
    if a.degree == 0:
        return interior_product(X, da)
    return exterior_derivative(interior_product(X, a)) + interior_product(X, da)


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    chart = _same_chart(X, Y)
    return VectorField(chart, [X.apply(Y.components[i]) - Y.apply(X.components[i])
                               for i in range(chart.dim)])


def evaluate_form(a: DifferentialForm, vectors: Sequence[VectorField]) -> Expr:
    """``a(v_1, ..., v_p)`` as a scalar expression."""
    if len(vectors) != a.degree:
        raise ValueError(f"{a.degree}-form evaluated on {len(vectors)} vectors")
    out = a.terms.get((), ZERO) if a.degree == 0 else ZERO
    for idx, c in a.terms.items():
        if not idx:
            continue
        M = [[v.components[i] for i in idx] for v in vectors]
        out = out + c * _det(M)
    return out


def _det(M: list[list[Expr]]) -> Expr:
    n = len(M)
    if n == 1:
        return M[0][0]
    out = ZERO
    for j in range(n):
        if M[0][j].is_zero_literal():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        out = out + (term if j % 2 == 0 else -term)
    return out


def coefficient_matrix(a: DifferentialForm) -> list[list[Expr]]:
    """Skew-symmetric matrix ``A[i][j] = a(d/dx_i, d/dx_j)`` of a 2-form."""
    if a.degree != 2:
        raise ValueError("coefficient matrix needs a 2-form")
    n = a.chart.dim
    A = [[ZERO] * n for _ in range(n)]
    for (i, j), c in a.terms.items():
        A[i][j] = c
        A[j][i] = -c
    return A


def form_from_matrix(chart: Chart, A: Sequence[Sequence[Expr]]) -> DifferentialForm:
    return DifferentialForm(chart, 2, {(i, j): A[i][j] for i, j in combinations(range(chart.dim), 2)})


def integrate_coefficients(a: DifferentialForm, t: str, plan: SamplePlan | None = None,
                           chart: Chart | None = None) -> DifferentialForm:
    """Integrate every coefficient over ``t`` in [0, 1]; optionally re-home the
    result on ``chart`` (indices must agree on the shared leading coordinates)."""
    chart = chart or a.chart
    return DifferentialForm(chart, a.degree, {k: integrate_unit_interval(v, t, plan)
                                              for k, v in a.terms.items()})
