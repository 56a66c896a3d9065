"""Reduction of LCS forms and structures along characteristic foliations.

The quotient ``N = Q/F`` is realised in a flattened chart as coordinate
deletion: ``pi`` forgets the leaf coordinates. A form on Q descends when it
kills the leaf directions and its coefficients do not depend on the leaf
coordinates; it is then transported to N by renumbering its indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .foliation import FlattenedFoliation, h1_class_decide, leafwise_residuals
from .forms import (Chart, DifferentialForm, SmoothMap, coefficient_matrix, exterior_derivative,
                    pullback, wedge)
from .geometry import (DistributionFrame, Embedding, characteristic_distribution,
                       frames_span_equal, restrict)
from .lcs import LcsStructure, conformal_equivalence_on, forms_conformally_equivalent
from .linalg import pfaffian
from .symbolic import ZERO, Expr, SamplePlan, differentiate, exp, is_zero, ln, substitute, var
from .symbolic.zero import ZeroVerdict, is_nonzero_everywhere


class ReductionHypothesisError(ValueError):
    """Input outside the scope of the reduction procedures (e.g. dim N <= 2)."""


class RankMismatch(ValueError):
    """The foliation does not match the characteristic distribution of the submanifold."""


class VerificationFailed(RuntimeError):
    """A reduced object failed its own certification; indicates invalid input."""


class PreconditionFailed(ValueError):
    pass


def _label(form: DifferentialForm, k: tuple[int, ...]) -> str:
    return "d" + "^d".join(form.names(k)) if k else "1"


@dataclass(frozen=True)
class ReducedChart:
    """Chart on ``N = Q/F`` carrying the transverse coordinates, with ``pi``."""

    foliation: FlattenedFoliation
    chart: Chart
    projection: SmoothMap

    @classmethod
    def of(cls, F: FlattenedFoliation) -> ReducedChart:
        Q = F.chart
        N = Q.restrict(F.transverse, "N")
        if N.dim <= 2:
            raise ReductionHypothesisError(
                f"the reduced manifold must have dimension greater than 2 (got {N.dim}); "
                "the Lee form is not unique in dimension 2")
        if N.dim % 2:
            raise ReductionHypothesisError(f"the reduced dimension {N.dim} is odd")
        return cls(F, N, SmoothMap(Q, N, [var(c) for c in F.transverse]))

    def descend(self, a: DifferentialForm, plan: SamplePlan) -> tuple[DifferentialForm, dict]:
        """Transport a basic form on Q to N. Returns the form and the basicness
        residuals: contractions with leaf fields and leaf derivatives."""
        F = self.foliation
        leaf = F.leaf_indices
        residuals: dict[str, ZeroVerdict] = {}
        terms = {}
        zero_leaves = {t: ZERO for t in F.leaves}
        for k, c in a.terms.items():
            if set(k) & leaf:
                residuals[f"leaf component {_label(a, k)}"] = is_zero(c, plan)
                continue
            for t in F.leaves:
                residuals[f"d/d{t} of {_label(a, k)}"] = is_zero(differentiate(c, t), plan)
            names = a.names(k)
            terms[tuple(self.chart.index(n) for n in names)] = substitute(c, zero_leaves)
        return DifferentialForm(self.chart, a.degree, terms), residuals


@dataclass
class ReductionReport:
    mode: str
    reduced: bool
    tau: DifferentialForm | None = None
    alpha: DifferentialForm | None = None
    primitive: Expr | None = None
    certificate: dict | None = None
    residuals: dict = field(default_factory=dict)
    chart_N: Chart | None = None

    @property
    def verdict(self) -> str:
        return "Reduced" if self.reduced else "Obstructed"

    def to_dict(self) -> dict:
        out = {"mode": self.mode, "verdict": self.verdict}
        if self.chart_N is not None:
            out["chart_N"] = list(self.chart_N.coords)
        if self.reduced:
            out["tau"] = str(self.tau)
            out["alpha"] = str(self.alpha)
            if self.primitive is not None:
                out["g"] = str(self.primitive)
        else:
            out["certificate"] = self.certificate
        out["residuals"] = {k: {kk: vv.to_dict() for kk, vv in v.items()}
                            for k, v in self.residuals.items()}
        return out


def match_foliation(iota: Embedding, Omega: DifferentialForm, F: FlattenedFoliation,
                    plan: SamplePlan) -> DistributionFrame:
    """Check that the leaves of ``F`` integrate the characteristic distribution."""
    if iota.source != F.chart:
        raise RankMismatch("the foliation lives on a different chart than the submanifold")
    iota.check_immersion(plan)
    frame = characteristic_distribution(iota, Omega, plan)
    leaf = DistributionFrame(F.chart, F.leaf_fields(), F.k)
    if frame.rank != F.k:
        raise RankMismatch(f"characteristic distribution has rank {frame.rank}, "
                           f"foliation has leaf dimension {F.k}")
    if not frames_span_equal(frame, leaf, plan):
        raise RankMismatch("characteristic distribution is not spanned by the leaf "
                           f"coordinate fields {', '.join(F.leaves)}")
    return frame


def _certify(report: ReductionReport, red: ReducedChart, target_tau: DifferentialForm,
             target_alpha: DifferentialForm, plan: SamplePlan, plan_N: SamplePlan) -> None:
    """Round trip and LCS axioms on N; raises :class:`VerificationFailed`."""
    tau, alpha = report.tau, report.alpha
    pf = pfaffian(coefficient_matrix(tau))
    bad = is_nonzero_everywhere(pf, plan_N)
    res = report.residuals
    res["tau nondegenerate"] = {"pfaffian": bad} if bad is not None else {}
    rt_tau = pullback(red.projection, tau) - target_tau
    rt_alpha = pullback(red.projection, alpha) - target_alpha
    res["pi*tau round trip"] = {_label(rt_tau, k): v for k, v in rt_tau.zero_verdicts(plan).items()}
    res["pi*alpha round trip"] = {_label(rt_alpha, k): v
                                  for k, v in rt_alpha.zero_verdicts(plan).items()}
    da = exterior_derivative(alpha)
    res["d(alpha)"] = {_label(da, k): v for k, v in da.zero_verdicts(plan_N).items()}
    lcs = exterior_derivative(tau) - wedge(alpha, tau)
    res["dtau - alpha^tau"] = {_label(lcs, k): v for k, v in lcs.zero_verdicts(plan_N).items()}
    for name, verdicts in res.items():
        for k, v in verdicts.items():
            if not v.is_zero:
                raise VerificationFailed(f"{name}: {k} nonzero at {v.witness}")


def _finish(mode, red, Omega_Q, omega_Q, g, plan, residuals) -> ReductionReport:
    plan_N = red.chart.plan(plan)
    tau, basic_tau = red.descend(Omega_Q, plan)
    alpha, basic_alpha = red.descend(omega_Q, plan)
    residuals["tau basic"] = basic_tau
    residuals["alpha basic"] = basic_alpha
    failed = [(k, v) for k, v in {**basic_tau, **basic_alpha}.items() if not v.is_zero]
    if failed:
        k, v = failed[0]
        return ReductionReport(mode, False, primitive=g, residuals=residuals, chart_N=red.chart,
                               certificate={"kind": "not_basic", "residual": k,
                                            "witness": v.witness, "value": v.value})
    report = ReductionReport(mode, True, tau, alpha, g, None, residuals, red.chart)
    _certify(report, red, Omega_Q, omega_Q, plan, plan_N)
    return report


def _setup(S: LcsStructure, iota: Embedding, F: FlattenedFoliation, plan: SamplePlan | None):
    if iota.target != S.chart:
        raise ValueError("the embedding does not land in the structure's chart")
    plan = iota.source.plan(plan)
    red = ReducedChart.of(F)
    match_foliation(iota, S.Omega, F, plan)
    return plan, red, restrict(iota, S.Omega), restrict(iota, S.lee)


def reduce_form(S: LcsStructure, iota: Embedding, F: FlattenedFoliation,
                plan: SamplePlan | None = None) -> ReductionReport:
    """Find ``tau`` on N with ``pi^*tau = iota^*Omega``; possible exactly when
    ``iota^*omega`` kills every leaf direction."""
    plan, red, Omega_Q, omega_Q = _setup(S, iota, F, plan)
    checks = {f"lee(d/d{t})": is_zero(omega_Q[t], plan) for t in F.leaves}
    residuals = {"lee on leaves": checks}
    for t in F.leaves:
        v = checks[f"lee(d/d{t})"]
        if not v.is_zero:
            return ReductionReport("FormLevel", False, certificate={
                "kind": "lee_on_leaf", "vector": f"d/d{t}", "value": str(omega_Q[t]),
                "witness": v.witness, "sample_value": v.value},
                residuals=residuals, chart_N=red.chart)
    return _finish("FormLevel", red, Omega_Q, omega_Q, None, plan, residuals)


def reduce_structure(S: LcsStructure, iota: Embedding, F: FlattenedFoliation,
                     plan: SamplePlan | None = None) -> ReductionReport:
    """Find ``tau`` on N with ``pi^*tau = exp(-g) iota^*Omega``, where ``g`` is a
    leafwise primitive of ``iota^*omega``; obstructed when none exists."""
    plan, red, Omega_Q, omega_Q = _setup(S, iota, F, plan)
    cls = h1_class_decide(omega_Q, F, plan)
    residuals = {"primitive": dict(cls.residuals)}
    if not cls.zero_class:
        return ReductionReport("StructureLevel", False, certificate=cls.certificate,
                               residuals=residuals, chart_N=red.chart)
    g = cls.primitive
    scaled = Omega_Q * exp(-g)
    shifted = omega_Q - exterior_derivative(DifferentialForm.function(F.chart, g))
    return _finish("StructureLevel", red, scaled, shifted, g, plan, residuals)


@dataclass
class InvarianceReport:
    factor: Expr
    same_foliation: bool
    leafwise: dict[str, ZeroVerdict]
    verdicts: tuple[str, str]
    reduced_equivalent: bool | None
    reports: tuple[ReductionReport, ReductionReport]

    @property
    def passed(self) -> bool:
        return (self.same_foliation and all(v.is_zero for v in self.leafwise.values())
                and self.verdicts[0] == self.verdicts[1] and self.reduced_equivalent is not False)

    def to_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "factor": str(self.factor),
            "same_foliation": self.same_foliation,
            "leafwise_residuals": {k: v.to_dict() for k, v in self.leafwise.items()},
            "reduction_verdicts": list(self.verdicts),
            "reduced_conformally_equivalent": self.reduced_equivalent,
        }


def verify_conformal_invariance(S1: LcsStructure, S2: LcsStructure, iota: Embedding,
                                F: FlattenedFoliation, plan: SamplePlan | None = None
                                ) -> InvarianceReport:
    """For ``iota^*Omega2 = f iota^*Omega1``: same characteristic foliation, the
    Lee forms differ by ``d ln f`` along leaves, and reduction verdicts agree."""
    plan = iota.source.plan(plan)
    eq = conformal_equivalence_on(iota, S1.Omega, S2.Omega, plan)
    if not eq.equivalent:
        raise PreconditionFailed(f"pullbacks are not conformally equivalent: {eq.witness}")
    f = eq.factor
    frame1 = characteristic_distribution(iota, S1.Omega, plan)
    frame2 = characteristic_distribution(iota, S2.Omega, plan)
    same = frames_span_equal(frame1, frame2, plan)
    dlnf = exterior_derivative(DifferentialForm.function(F.chart, ln(f)))
    diff = restrict(iota, S2.lee) - restrict(iota, S1.lee) - dlnf
    leafwise = leafwise_residuals(diff, F, plan)
    r1 = reduce_structure(S1, iota, F, plan)
    r2 = reduce_structure(S2, iota, F, plan)
    equivalent = None
    if r1.reduced and r2.reduced:
        equivalent = forms_conformally_equivalent(r1.tau, r2.tau,
                                                  r1.chart_N.plan(plan)).equivalent
    return InvarianceReport(f, same, leafwise, (r1.verdict, r2.verdict), equivalent, (r1, r2))


__all__ = [
    "ReducedChart", "ReductionReport", "InvarianceReport", "RankMismatch",
    "ReductionHypothesisError", "VerificationFailed", "PreconditionFailed",
    "match_foliation", "reduce_form", "reduce_structure", "verify_conformal_invariance",
]
