"""Locally conformal symplectic forms: validation, Lee forms, conformal changes."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .forms import (Chart, DifferentialForm, coefficient_matrix, exterior_derivative,
                    wedge)
from .geometry import Embedding, restrict
from .linalg import InconsistentSystem, pfaffian, solve
from .symbolic import ZERO, Expr, SamplePlan, is_zero, ln
from .symbolic.zero import TWO_PI, ZeroVerdict, is_nonzero_everywhere, sample_values


class Degenerate(ValueError):
    def __init__(self, verdict: ZeroVerdict):
        where = "identically" if verdict.witness is None else f"at {verdict.witness}"
        super().__init__(f"2-form is degenerate: Pfaffian vanishes {where}")
        self.verdict = verdict


class NotLCS(ValueError):
    pass


class NonPositiveWitness(ValueError):
    def __init__(self, factor: Expr, point: dict, value: float):
        super().__init__(f"conformal factor {factor} is not positive at {point} (value {value:.6g})")
        self.point = point
        self.value = value


class ZeroPullback(ValueError):
    pass


def _residual_verdicts(form: DifferentialForm, plan: SamplePlan) -> dict[str, ZeroVerdict]:
    return {"d" + "^d".join(form.names(k)): v for k, v in form.zero_verdicts(plan).items()}


def _check_dimension(chart: Chart) -> None:
    if chart.dim % 2 or chart.dim < 4:
        raise ValueError(f"LCS structures need an even dimension 2n > 2, got {chart.dim}")


def check_nondegenerate(Omega: DifferentialForm, plan: SamplePlan) -> Expr:
    """Exact Pfaffian of ``Omega``'s coefficient matrix, required nonzero at every sample."""
    pf = pfaffian(coefficient_matrix(Omega))
    bad = is_nonzero_everywhere(pf, plan)
    if bad is not None:
        raise Degenerate(bad)
    return pf


def lee_form(Omega: DifferentialForm, plan: SamplePlan | None = None,
             equation_order: list[int] | None = None) -> DifferentialForm:
    """The unique 1-form ``w`` with ``w ^ Omega = d Omega``.

    Unknowns are the 2n coefficients of ``w``; each triple ``i<j<k`` contributes
    one linear equation. ``equation_order`` permutes the equations (the result
    must not depend on it).
    """
    chart = Omega.chart
    _check_dimension(chart)
    if Omega.degree != 2:
        raise ValueError("the Lee form is defined for 2-forms")
    plan = chart.plan(plan)
    check_nondegenerate(Omega, plan)
    dOmega = exterior_derivative(Omega)
    n = chart.dim
    basis = [wedge(DifferentialForm.basis(chart, c), Omega) for c in chart.coords]
    triples = list(combinations(range(n), 3))
    if equation_order is not None:
        triples = [triples[i] for i in equation_order]
    A = [[basis[i].terms.get(t, ZERO) for i in range(n)] for t in triples]
    b = [dOmega.terms.get(t, ZERO) for t in triples]
    try:
        coeffs = solve(A, b, plan)
    except InconsistentSystem as exc:
        raise NotLCS(f"d(Omega) is not of the form w ^ Omega: {exc}") from None
    omega = DifferentialForm(chart, 1, {(i,): c for i, c in enumerate(coeffs)})
    verify_lee(Omega, omega, plan)
    return omega


def verify_lee(Omega: DifferentialForm, omega: DifferentialForm, plan: SamplePlan) -> dict:
    """Residuals of ``d Omega - w ^ Omega`` and ``d w``; raises :class:`NotLCS` on failure."""
    structure = exterior_derivative(Omega) - wedge(omega, Omega)
    closed = exterior_derivative(omega)
    res = {"dOmega - lee^Omega": _residual_verdicts(structure, plan),
           "d(lee)": _residual_verdicts(closed, plan)}
    for name, verdicts in res.items():
        for k, v in verdicts.items():
            if not v.is_zero:
                raise NotLCS(f"{name} has nonzero coefficient on {k} at {v.witness}")
    return res


def periodicity_defects(form: DifferentialForm, plan: SamplePlan) -> list[str]:
    """Periodic coordinates along which some coefficient is not 2*pi-periodic
    at the samples (the form is then only a local representative)."""
    out = []
    for name in sorted(form.chart.periodic):
        for c in form.terms.values():
            if name not in c.vars:
                continue
            pts = plan.draw(c.vars)
            with np.errstate(all="ignore"):
                base = c.evaluate(pts)
                moved = dict(pts)
                moved[name] = pts[name] + TWO_PI
                other = c.evaluate(moved)
            if not np.allclose(base, other, rtol=1e-9, atol=plan.tol):
                out.append(name)
                break
    return out


@dataclass
class LcsStructure:
    """A validated triple (chart, Omega, Lee form) with its verification residuals."""

    chart: Chart
    Omega: DifferentialForm
    lee: DifferentialForm
    pfaffian: Expr
    residuals: dict = field(default_factory=dict)
    periodic_defects: list = field(default_factory=list)

    @classmethod
    def from_form(cls, Omega: DifferentialForm, plan: SamplePlan | None = None,
                  lee: DifferentialForm | None = None) -> LcsStructure:
        """Validate ``Omega``; solve for its Lee form unless one is supplied to verify."""
        chart = Omega.chart
        _check_dimension(chart)
        plan = chart.plan(plan)
        if lee is None:
            lee = lee_form(Omega, plan)
            pf = pfaffian(coefficient_matrix(Omega))
        else:
            pf = check_nondegenerate(Omega, plan)
        residuals = verify_lee(Omega, lee, plan)
        return cls(chart, Omega, lee, pf, residuals, periodicity_defects(Omega, plan))

    def to_dict(self) -> dict:
        return {
            "chart": list(self.chart.coords),
            "Omega": str(self.Omega),
            "lee_form": str(self.lee),
            "pfaffian": str(self.pfaffian),
            "residuals": {k: {kk: vv.to_dict() for kk, vv in v.items()}
                          for k, v in self.residuals.items()},
            "periodicity_defects": list(self.periodic_defects),
        }


def check_positive(f: Expr, plan: SamplePlan) -> None:
    points, values, _ = sample_values(f, plan)
    bad = np.flatnonzero(values <= plan.tol)
    if bad.size:
        i = int(bad[0])
        raise NonPositiveWitness(f, {k: float(v[i]) for k, v in points.items()}, float(values[i]))


def conformal_rescale(S: LcsStructure, f: Expr, plan: SamplePlan | None = None) -> LcsStructure:
    """``(f Omega, w + d ln f)``, re-validated. ``f`` is ideally given as ``exp(h)``
    so that ``ln f = h`` stays in the expression class."""
    plan = S.chart.plan(plan)
    check_positive(f, plan)
    Omega = S.Omega * f
    lee = S.lee + exterior_derivative(DifferentialForm.function(S.chart, ln(f)))
    return LcsStructure.from_form(Omega, plan, lee=lee)


@dataclass
class Equivalence:
    """Verdict of :func:`conformal_equivalence_on`."""

    equivalent: bool
    factor: Expr | None = None
    witness: dict | None = None
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"verdict": "Equivalent" if self.equivalent else "NotEquivalent"}
        if self.factor is not None:
            out["factor"] = str(self.factor)
        if self.witness is not None:
            out["witness"] = self.witness
        out["residuals"] = {k: v.to_dict() for k, v in self.residuals.items()}
        return out


def conformal_equivalence_on(iota: Embedding, Omega1: DifferentialForm, Omega2: DifferentialForm,
                             plan: SamplePlan | None = None) -> Equivalence:
    """Decide whether ``iota^*Omega2 = f iota^*Omega1`` for a positive ``f`` on Q."""
    plan = iota.source.plan(plan)
    p1, p2 = restrict(iota, Omega1), restrict(iota, Omega2)
    return forms_conformally_equivalent(p1, p2, plan)


def forms_conformally_equivalent(p1: DifferentialForm, p2: DifferentialForm,
                                 plan: SamplePlan) -> Equivalence:
    lead = None
    for k, c in p1.terms.items():
        if not is_zero(c, plan).is_zero:
            lead = k
            break
    if lead is None:
        raise ZeroPullback("the first form pulls back to zero: no candidate factor")
    f = p2.terms.get(lead, ZERO) / p1.terms[lead]
    residual = p2 - p1 * f
    verdicts = _residual_verdicts(residual, plan)
    for k, v in verdicts.items():
        if not v.is_zero:
            return Equivalence(False, f, {"coefficient": k, "point": v.witness,
                                          "value": v.value}, verdicts)
    try:
        check_positive(f, plan)
    except NonPositiveWitness as exc:
        return Equivalence(False, f, {"coefficient": "factor", "point": exc.point,
                                      "value": exc.value}, verdicts)
    return Equivalence(True, f, None, verdicts)
