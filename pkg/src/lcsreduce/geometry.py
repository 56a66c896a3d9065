"""Parametrised submanifolds and their characteristic distributions."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .forms import (Chart, DifferentialForm, SmoothMap, VectorField, coefficient_matrix,
                    interior_product, lie_bracket, pullback)
from .linalg import nullspace, numeric_ranks, sample_ranks
from .symbolic import SamplePlan, is_zero
from .symbolic.zero import ZeroVerdict


class NotImmersed(ValueError):
    pass


class RankNotConstant(ValueError):
    """The kernel of the pulled-back form changes dimension between samples."""

    def __init__(self, ranks: tuple[int, int], points: tuple[dict, dict]):
        super().__init__(f"rank of the restricted form varies: {ranks[0]} at {points[0]}, "
                         f"{ranks[1]} at {points[1]}")
        self.ranks = ranks
        self.points = points


@dataclass
class Embedding:
    """``iota: chart_Q -> chart_M`` given by components; must be an immersion."""

    map: SmoothMap

    @classmethod
    def from_components(cls, source: Chart, target: Chart, components) -> Embedding:
        return cls(SmoothMap(source, target, components))

    @classmethod
    def identity(cls, chart: Chart) -> Embedding:
        return cls(SmoothMap.identity(chart))

    @classmethod
    def slice(cls, target: Chart, fixed: dict, name: str = "Q") -> Embedding:
        """Inclusion of ``{x_i = c_i}``; the source keeps the remaining coordinates in order."""
        keep = [c for c in target.coords if c not in fixed]
        source = target.restrict(keep, name)
        comps = [fixed.get(c, None) for c in target.coords]
        comps = [source.var(n) if v is None else v for n, v in zip(target.coords, comps)]
        return cls(SmoothMap(source, target, comps))

    @property
    def source(self) -> Chart:
        return self.map.source

    @property
    def target(self) -> Chart:
        return self.map.target

    @property
    def jacobian(self):
        return self.map.jacobian()

    def check_immersion(self, plan: SamplePlan | None = None) -> None:
        plan = self.source.plan(plan)
        ranks, points = sample_ranks(self.jacobian, plan, self.source.coords)
        bad = np.flatnonzero(ranks < self.source.dim)
        if bad.size:
            i = int(bad[0])
            raise NotImmersed(f"Jacobian has rank {ranks[i]} < {self.source.dim} at "
                              f"{ {k: float(v[i]) for k, v in points.items()} }")


def restrict(iota: Embedding, omega: DifferentialForm) -> DifferentialForm:
    """``iota^* omega``."""
    return pullback(iota.map, omega)


@dataclass
class DistributionFrame:
    """Vector fields on ``chart`` spanning a distribution of rank ``rank``.

    ``sample_ranks`` records the numeric rank of the restricted form at each
    sample; constant rank is only certified on that sample set.
    """

    chart: Chart
    fields: list[VectorField]
    rank: int
    sample_ranks: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if len(self.fields) != self.rank:
            raise ValueError(f"frame has {len(self.fields)} fields but claims rank {self.rank}")

    def matrix(self):
        return [list(X.components) for X in self.fields]

    def check_independent(self, plan: SamplePlan | None = None) -> bool:
        if not self.fields:
            return True
        plan = self.chart.plan(plan)
        ranks, _ = sample_ranks(self.matrix(), plan, self.chart.coords)
        return bool((ranks == self.rank).all())


def characteristic_distribution(iota: Embedding, omega: DifferentialForm,
                                plan: SamplePlan | None = None) -> DistributionFrame:
    """Frame of ``ker iota^*omega = (TQ)^omega intersected with TQ``."""
    chart = iota.source
    plan = chart.plan(plan)
    pulled = restrict(iota, omega)
    return kernel_frame(pulled, plan)


def kernel_frame(pulled: DifferentialForm, plan: SamplePlan | None = None) -> DistributionFrame:
    chart = pulled.chart
    plan = chart.plan(plan)
    A = coefficient_matrix(pulled)
    ranks, points = sample_ranks(A, plan, chart.coords)
    if len(set(ranks.tolist())) > 1:
        i = 0
        j = int(np.flatnonzero(ranks != ranks[0])[0])
        pt = lambda k: {n: float(v[k]) for n, v in points.items()}  # noqa: E731
        raise RankNotConstant((int(ranks[i]), int(ranks[j])), (pt(i), pt(j)))
    basis = nullspace(A, plan)
    fields = [VectorField(chart, v) for v in basis]
    expected = chart.dim - int(ranks[0])
    if len(fields) != expected:
        raise RankNotConstant((chart.dim - len(fields), int(ranks[0])), ({}, {}))
    return DistributionFrame(chart, fields, len(fields), tuple(int(r) for r in ranks))


@dataclass
class InvolutivityReport:
    """One entry per frame pair: the verdicts of ``[X_i, X_j] _| omega``."""

    pairs: list[tuple[int, int, dict[str, ZeroVerdict]]]

    @property
    def involutive(self) -> bool:
        return all(v.is_zero for _, _, res in self.pairs for v in res.values())

    def failures(self):
        return [(i, j, k, v) for i, j, res in self.pairs for k, v in res.items() if not v.is_zero]

    def to_dict(self) -> dict:
        return {
            "involutive": self.involutive,
            "pairs": [{"i": i, "j": j, "residuals": {k: v.to_dict() for k, v in res.items()}}
                      for i, j, res in self.pairs],
        }


def involutivity_check(frame: DistributionFrame, omega_pulled: DifferentialForm,
                       plan: SamplePlan | None = None) -> InvolutivityReport:
    """Check ``[X_i, X_j] _| omega_pulled = 0`` for every pair of frame fields."""
    plan = frame.chart.plan(plan)
    pairs = []
    for i, j in combinations(range(len(frame.fields)), 2):
        bracket = lie_bracket(frame.fields[i], frame.fields[j])
        residual = interior_product(bracket, omega_pulled)
        verdicts = {"d" + "".join(residual.names(k)): is_zero(c, plan)
                    for k, c in residual.terms.items()}
        pairs.append((i, j, verdicts))
    return InvolutivityReport(pairs)


def frames_span_equal(a: DistributionFrame, b: DistributionFrame,
                      plan: SamplePlan | None = None) -> bool:
    """Mutual rank test: stacking both frames does not raise the rank at any sample."""
    if a.rank != b.rank:
        return False
    if a.rank == 0:
        return True
    plan = a.chart.plan(plan)
    points = plan.draw(a.chart.coords)
    ra = _ranks(a.matrix(), points)
    rab = _ranks(a.matrix() + b.matrix(), points)
    return bool((ra == a.rank).all() and (rab == a.rank).all())


def _ranks(M: Sequence, points) -> np.ndarray:
    return numeric_ranks(M, points)
