"""Tangential de Rham complex of a flattened foliation.

A :class:`FlattenedFoliation` designates some chart coordinates as leaf
coordinates; leaves are the slices on which all other (transverse)
coordinates are constant. In such a chart a form vanishes on leaf-tangent
vectors exactly when its coefficients on purely-leaf multi-indices vanish.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .forms import (Chart, DifferentialForm, SmoothMap, VectorField, exterior_derivative,
                    integrate_coefficients, interior_product, pullback)
from .symbolic import (ZERO, Expr, SamplePlan, antiderivative, as_expr, circle_mean,
                       differentiate, is_zero, substitute, var)
from .symbolic.zero import TWO_PI, ZeroVerdict

TIME = "t"


class HypothesisViolation(ValueError):
    """The differential of the input is not leafwise-vanishing."""


@dataclass(frozen=True)
class FlattenedFoliation:
    chart: Chart
    leaves: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "leaves", tuple(self.leaves))
        for n in self.leaves:
            self.chart.index(n)
        if len(set(self.leaves)) != len(self.leaves):
            raise ValueError("repeated leaf coordinate")
        if not 1 <= len(self.leaves) < self.chart.dim:
            raise ValueError(f"leaf dimension must be in [1, {self.chart.dim - 1}], "
                             f"got {len(self.leaves)}")

    @property
    def k(self) -> int:
        return len(self.leaves)

    @property
    def leaf_indices(self) -> frozenset:
        return frozenset(self.chart.index(n) for n in self.leaves)

    @property
    def transverse(self) -> tuple[str, ...]:
        return tuple(c for c in self.chart.coords if c not in self.leaves)

    def periodic_leaves(self) -> tuple[str, ...]:
        return tuple(n for n in self.leaves if n in self.chart.periodic)

    def leaf_fields(self) -> list[VectorField]:
        return [VectorField.coordinate(self.chart, n) for n in self.leaves]


def leafwise_part(a: DifferentialForm, F: FlattenedFoliation) -> dict[tuple[int, ...], Expr]:
    """Coefficients of ``a`` on multi-indices made only of leaf coordinates."""
    L = F.leaf_indices
    return {k: c for k, c in a.terms.items() if set(k) <= L}


def leafwise_residuals(a: DifferentialForm, F: FlattenedFoliation,
                       plan: SamplePlan | None = None) -> dict[str, ZeroVerdict]:
    plan = F.chart.plan(plan)
    return {_label(a, k): is_zero(c, plan) for k, c in leafwise_part(a, F).items()}


def is_leafwise_vanishing(a: DifferentialForm, F: FlattenedFoliation,
                          plan: SamplePlan | None = None) -> bool:
    """Membership of ``a`` in the subcomplex of forms vanishing on leaf vectors."""
    if a.chart != F.chart:
        raise ValueError("form and foliation live on different charts")
    if a.degree > F.k:
        return True
    return all(v.is_zero for v in leafwise_residuals(a, F, plan).values())


@dataclass
class TangentialClassReport:
    """Verdict on the class of a 1-form in the first tangential cohomology."""

    zero_class: bool
    primitive: Expr | None = None
    certificate: dict | None = None
    residuals: dict[str, ZeroVerdict] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "ZeroClass" if self.zero_class else "Obstructed"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict}
        if self.primitive is not None:
            out["primitive"] = str(self.primitive)
        if self.certificate is not None:
            out["certificate"] = self.certificate
        out["residuals"] = {k: v.to_dict() for k, v in self.residuals.items()}
        return out


def h1_class_decide(omega: DifferentialForm, F: FlattenedFoliation,
                    plan: SamplePlan | None = None) -> TangentialClassReport:
    """Decide whether ``omega`` agrees with ``dg`` on leaf vectors for some ``g``.

    Each periodic leaf direction must have zero circle mean (otherwise the
    nonzero mean is returned as the obstruction); then ``g`` is built by
    integrating leaf coordinate by leaf coordinate, normalised so that it
    vanishes where all leaf coordinates are 0.
    """
    if omega.degree != 1:
        raise ValueError("tangential class decision is for 1-forms")
    plan = F.chart.plan(plan)
    compat = leafwise_residuals(exterior_derivative(omega), F, plan)
    bad = {k: v for k, v in compat.items() if not v.is_zero}
    if bad:
        k, v = next(iter(bad.items()))
        raise HypothesisViolation(
            f"d(omega) does not vanish on leaves: coefficient {k} nonzero at {v.witness}")

    comp = {n: omega[n] for n in F.leaves}
    for theta in F.periodic_leaves():
        mean = circle_mean(comp[theta], theta)
        for other in F.periodic_leaves():
            if other != theta:
                mean = circle_mean(mean, other)
        verdict = is_zero(mean, plan)
        if not verdict.is_zero:
            return TangentialClassReport(False, certificate={
                "kind": "circle_mean", "coordinate": theta, "mean": str(mean),
                "witness": verdict.witness, "value": verdict.value})

    g = ZERO
    for t in F.leaves:
        remainder = comp[t] - differentiate(g, t)
        g = g + antiderivative(remainder, t, plan)
    residuals = {f"d/d{t}": is_zero(differentiate(g, t) - comp[t], plan) for t in F.leaves}
    failed = [k for k, v in residuals.items() if not v.is_zero]
    if failed:
        return TangentialClassReport(False, g, {"kind": "compatibility", "component": failed[0],
                                                "witness": residuals[failed[0]].witness},
                                     residuals)
    return TangentialClassReport(True, g, None, residuals)


@dataclass
class LeafCheck:
    ok: bool
    witness: dict | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        out = {"ok": self.ok}
        if not self.ok:
            out["reason"] = self.reason
            out["witness"] = self.witness
        return out


def leaf_restriction_check(omega: DifferentialForm, F: FlattenedFoliation,
                           report: TangentialClassReport, plan: SamplePlan | None = None,
                           primitive: Expr | None = None, points_per_leaf: int = 5) -> LeafCheck:
    """On sampled leaves (transverse coordinates frozen), compare the restriction
    of ``omega`` with ``d(g|leaf)`` and check ``g`` is single-valued along
    periodic leaf directions. ``primitive`` overrides the report's ``g``."""
    if not report.zero_class and primitive is None:
        raise ValueError("leaf restriction check needs a ZeroClass report")
    g = report.primitive if primitive is None else primitive
    plan = F.chart.plan(plan)
    n_leaves = plan.samples
    leaves = plan.draw(F.transverse, n_leaves)
    along = plan.with_seed(plan.seed + 1).draw(F.leaves, n_leaves * points_per_leaf)
    env = {k: np.repeat(v, points_per_leaf) for k, v in leaves.items()}
    env.update(along)

    def witness(i):
        return {"leaf": {k: float(leaves[k][i // points_per_leaf]) for k in leaves},
                "point": {k: float(env[k][i]) for k in F.leaves}}

    with np.errstate(all="ignore"):
        for t in F.leaves:
            res = differentiate(g, t) - omega[t]
            if res.is_zero_literal():
                continue
            vals = np.broadcast_to(res.evaluate(env), (n_leaves * points_per_leaf,))
            bad = np.flatnonzero(~(np.abs(vals) <= plan.tol))
            if bad.size:
                return LeafCheck(False, witness(int(bad[0])), f"omega - dg nonzero along {t}")
        for theta in F.periodic_leaves():
            shifted = dict(env)
            shifted[theta] = env[theta] + TWO_PI
            jump = np.broadcast_to(g.evaluate(shifted) - g.evaluate(env),
                                   (n_leaves * points_per_leaf,))
            bad = np.flatnonzero(~(np.abs(jump) <= plan.tol))
            if bad.size:
                return LeafCheck(False, witness(int(bad[0])),
                                 f"primitive is not single-valued along {theta}")
    return LeafCheck(True)


@dataclass
class ContractionFamily:
    """``F_t: Q -> Q`` for t in [0, 1] with ``F_1 = id``, ``F_0(Q)`` inside the slice
    ``S = {leaf coordinates in `slice` fixed}`` and every ``F_t`` preserving leaves.
    Components are expressions in the chart coordinates and the reserved ``t``."""

    foliation: FlattenedFoliation
    components: tuple[Expr, ...]
    slice: Mapping[str, Expr]

    def __post_init__(self):
        chart = self.chart
        if TIME in chart.coords:
            raise ValueError(f"coordinate name {TIME!r} is reserved for the contraction time")
        self.components = tuple(as_expr(c) for c in self.components)
        self.slice = {k: as_expr(v) for k, v in dict(self.slice).items()}
        if len(self.components) != chart.dim:
            raise ValueError("one component per chart coordinate is required")
        allowed = set(chart.coords) | {TIME}
        for c in self.components:
            if c.vars - allowed:
                raise ValueError(f"component {c} uses unknown coordinates")
        for k, v in self.slice.items():
            if k not in self.foliation.leaves:
                raise ValueError(f"slice coordinate {k} is not a leaf coordinate")
            if v.constant_value() is None:
                raise ValueError("slice values must be constants")

    @property
    def chart(self) -> Chart:
        return self.foliation.chart

    def extended_chart(self) -> Chart:
        return Chart(self.chart.coords + (TIME,), self.chart.periodic)

    def time_map(self) -> SmoothMap:
        """``G(x, t) = F_t(x)`` from Q x [0, 1] to Q."""
        return SmoothMap(self.extended_chart(), self.chart, self.components)

    def at(self, t: int) -> SmoothMap:
        return SmoothMap(self.chart, self.chart,
                         [substitute(c, {TIME: as_expr(t)}) for c in self.components])

    def slice_inclusion(self) -> SmoothMap:
        """``i_S: S -> Q``; S keeps the coordinates not fixed by the slice."""
        keep = [c for c in self.chart.coords if c not in self.slice]
        source = self.chart.restrict(keep, "S")
        return SmoothMap(source, self.chart,
                         [self.slice.get(c, var(c)) for c in self.chart.coords])

    def plan(self, plan: SamplePlan | None = None) -> SamplePlan:
        plan = self.chart.plan(plan)
        return SamplePlan(plan.samples, plan.seed, plan.tol,
                          plan.intervals + ((TIME, 0.0, 1.0),), plan.periodic)

    def validate(self, plan: SamplePlan | None = None) -> dict[str, ZeroVerdict]:
        plan = self.plan(plan)
        coords = self.chart.coords
        out: dict[str, ZeroVerdict] = {}
        F1, F0 = self.at(1), self.at(0)
        for n, c in zip(coords, F1.components):
            out[f"F1 = id [{n}]"] = is_zero(c - var(n), plan)
        for n, c in zip(coords, F0.components):
            if n in self.slice:
                out[f"F0 in S [{n}]"] = is_zero(c - self.slice[n], plan)
        on_s = {k: v for k, v in self.slice.items()}
        for n, c in zip(coords, F0.components):
            target = self.slice.get(n, var(n))
            out[f"F0|S = id [{n}]"] = is_zero(substitute(c, on_s) - target, plan)
        for n, c in zip(coords, self.components):
            if n not in self.foliation.leaves:
                out[f"leaf preserved [{n}]"] = is_zero(c - var(n), plan)
        failed = [k for k, v in out.items() if not v.is_zero]
        if failed:
            raise ValueError(f"not a contraction along the foliation: {failed[0]} fails")
        return out


@dataclass
class HomotopyResult:
    """Output of :func:`homotopy_operator`.

    ``alpha`` integrates ``F_t^*(V_t _| omega)`` and ``beta`` integrates
    ``F_t^*(V_t _| d omega)``; ``omega - F_0^* omega = beta + d alpha`` holds
    exactly and ``beta`` vanishes on leaves when ``d omega`` does. For a
    function ``h`` the time integral of ``dh`` is stored as ``alpha`` and equals
    ``h - h o F_0``; ``beta`` is then zero.
    """

    alpha: DifferentialForm
    beta: DifferentialForm
    pulled_back: DifferentialForm
    identity_residuals: dict[str, ZeroVerdict]
    leafwise_residuals: dict[str, ZeroVerdict]
    hypothesis_holds: bool
    contraction_checks: dict[str, ZeroVerdict] = field(default_factory=dict)
    section_residuals: dict[str, ZeroVerdict] = field(default_factory=dict)

    @property
    def residual_leafwise_vanishing(self) -> bool:
        return all(v.is_zero for v in self.leafwise_residuals.values())

    @property
    def identity_holds(self) -> bool:
        return all(v.is_zero for v in self.identity_residuals.values())

    def to_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "F0_pullback": str(self.pulled_back),
            "hypothesis_holds": self.hypothesis_holds,
            "identity_holds": self.identity_holds,
            "residual_leafwise_vanishing": self.residual_leafwise_vanishing,
            "identity_residuals": {k: v.to_dict() for k, v in self.identity_residuals.items()},
            "leafwise_residuals": {k: v.to_dict() for k, v in self.leafwise_residuals.items()},
            "section_residuals": {k: v.to_dict() for k, v in self.section_residuals.items()},
        }


def _time_integral(form: DifferentialForm, C: ContractionFamily, plan: SamplePlan):
    """``int_0^1 F_t^*(V_t _| form) dt`` via ``iota_{d/dt} G^* form`` on Q x [0, 1];
    no need to solve ``V_t o F_t = dF_t/dt`` for ``V_t``."""
    ext = C.extended_chart()
    G = C.time_map()
    contracted = interior_product(VectorField.coordinate(ext, TIME), pullback(G, form))
    return integrate_coefficients(contracted, TIME, plan, chart=C.chart)


def homotopy_operator(omega: DifferentialForm, C: ContractionFamily,
                      plan: SamplePlan | None = None, strict: bool = True) -> HomotopyResult:
    """Homotopy operator of a contraction along the foliation.

    With ``strict`` a form whose differential is not leafwise-vanishing is
    rejected; otherwise the result only records ``hypothesis_holds=False``.
    """
    F = C.foliation
    if omega.chart != C.chart:
        raise ValueError("form and contraction live on different charts")
    plan = C.plan(plan)
    checks = C.validate(plan)
    domega = exterior_derivative(omega)
    f0 = pullback(C.at(0), omega)
    lhs = omega - f0
    if omega.degree == 0:
        # Functions: the time integral of dh along the contraction is h - h o F_0
        # itself, so it is reported as alpha and nothing is left over.
        hypothesis = True
        alpha = _time_integral(domega, C, plan)
        beta = DifferentialForm.zero(C.chart, 0)
        identity = residual = lhs - alpha
    else:
        hypothesis = is_leafwise_vanishing(domega, F, plan)
        if strict and not hypothesis:
            raise HypothesisViolation("d(omega) is not leafwise-vanishing")
        alpha = _time_integral(omega, C, plan)
        beta = _time_integral(domega, C, plan)
        residual = lhs - exterior_derivative(alpha)
        identity = residual - beta
    id_res = {_label(identity, k): v for k, v in identity.zero_verdicts(plan).items()}
    leaf_res = (leafwise_residuals(residual, F, plan) if residual.degree <= F.k else {})
    inc = C.slice_inclusion()
    section = pullback(inc, f0) - pullback(inc, omega)
    sec_res = {_label(section, k): v for k, v in section.zero_verdicts(plan).items()}
    return HomotopyResult(alpha, beta, f0, id_res, leaf_res, hypothesis, checks, sec_res)


def _label(form: DifferentialForm, k: tuple[int, ...]) -> str:
    return "d" + "^d".join(form.names(k)) if k else "1"


def leaf_constant(e: Expr, F: FlattenedFoliation, plan: SamplePlan | None = None) -> bool:
    """Whether ``e`` has zero derivative along every leaf coordinate."""
    plan = F.chart.plan(plan)
    return all(is_zero(differentiate(e, t), plan).is_zero for t in F.leaves)


def leaf_values(omega: DifferentialForm, F: FlattenedFoliation) -> dict[str, Expr]:
    """``omega(d/dt_j)`` for every leaf coordinate ``t_j``."""
    return {t: omega[t] for t in F.leaves}


__all__ = [
    "FlattenedFoliation", "TangentialClassReport", "ContractionFamily", "HomotopyResult",
    "LeafCheck", "HypothesisViolation", "is_leafwise_vanishing", "leafwise_residuals",
    "h1_class_decide", "leaf_restriction_check", "homotopy_operator", "leaf_constant",
    "leaf_values", "TIME",
]
