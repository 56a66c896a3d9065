"""Two-tier zero testing: canonical form first, then seeded random sampling."""
from __future__ import annotations

import enum
import math
import zlib
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from .expr import Expr

TWO_PI = 2.0 * math.pi
OVERSAMPLING = 10


class EvaluationError(ArithmeticError):
    """Too many sample points hit a singularity (division by zero, ln of x <= 0)."""


@dataclass(frozen=True)
class SamplePlan:
    """Where and how densely symbolic identities are probed numerically.

    ``intervals`` overrides the default box per coordinate; affine coordinates
    default to [-1, 1] and periodic ones to [0, 2*pi).
    """

    samples: int = 25
    seed: int = 0
    tol: float = 1e-9
    intervals: tuple[tuple[str, float, float], ...] = ()
    periodic: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("sample count must be >= 1")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")

    def interval(self, name: str) -> tuple[float, float]:
        for n, lo, hi in self.intervals:
            if n == name:
                return lo, hi
        if name in self.periodic:
            return 0.0, TWO_PI
        return -1.0, 1.0

    def for_chart(self, chart) -> SamplePlan:
        """Copy of the plan that knows which of ``chart``'s coordinates are periodic."""
        periodic = frozenset(getattr(chart, "periodic", ()))
        if periodic <= self.periodic:
            return self
        return replace(self, periodic=self.periodic | periodic)

    def with_seed(self, seed: int) -> SamplePlan:
        return replace(self, seed=seed)

    def draw(self, names: Iterable[str], count: int | None = None) -> dict[str, np.ndarray]:
        """Deterministic sample values per coordinate; a coordinate always gets
        the same values for a given seed, whichever expression asks."""
        count = self.samples if count is None else count
        out = {}
        for name in sorted(set(names)):
            rng = np.random.default_rng([self.seed, zlib.crc32(name.encode())])
            lo, hi = self.interval(name)
            out[name] = rng.uniform(lo, hi, size=count)
        return out


class Tier(str, enum.Enum):
    PROVEN_ZERO = "ProvenZero"
    PROBABLY_ZERO = "ProbablyZero"
    NONZERO = "NonZero"


@dataclass(frozen=True)
class ZeroVerdict:
    tier: Tier
    witness: dict[str, float] | None = None
    value: float | None = None

    @property
    def is_zero(self) -> bool:
        return self.tier is not Tier.NONZERO

    def to_dict(self) -> dict:
        out = {"tier": self.tier.value}
        if self.witness is not None:
            out["witness"] = {k: _round(v) for k, v in self.witness.items()}
            out["value"] = _round(self.value)
        return out


PROVEN = ZeroVerdict(Tier.PROVEN_ZERO)


def _round(x: float) -> float:
    return float(f"{x:.12g}")


def sample_values(e: Expr, plan: SamplePlan, extra: Iterable[str] = ()):
    """Evaluate ``e`` at the plan's points, re-drawing singular ones.

    Returns ``(points, values, scales)`` for exactly ``plan.samples`` valid points,
    where ``scales`` is the sum of absolute term magnitudes at each point.
    """
    names = sorted(e.vars | set(extra))
    pool = plan.samples * OVERSAMPLING
    env = plan.draw(names, pool)
    with np.errstate(all="ignore"):
        terms = e.term_values(env)
        values = np.zeros(pool)
        scales = np.zeros(pool)
        for t in terms:
            values = values + t
            scales = scales + np.abs(t)
    ok = np.isfinite(values) & np.isfinite(scales)
    idx = np.flatnonzero(ok)[: plan.samples]
    if len(idx) < plan.samples:
        raise EvaluationError(
            f"{e} is singular at too many sample points ({int(ok.sum())} valid of {pool})")
    points = {k: v[idx] for k, v in env.items()}
    return points, values[idx], scales[idx]


def is_zero(e: Expr, plan: SamplePlan | None = None) -> ZeroVerdict:
    """ProvenZero if the canonical form is literally 0; otherwise ProbablyZero if
    every sample is below ``plan.tol`` (relative to the term magnitudes when
    those exceed 1), else NonZero with the worst sample as witness."""
    if e.is_zero_literal():
        return PROVEN
    plan = plan or SamplePlan()
    points, values, scales = sample_values(e, plan)
    bound = plan.tol * np.maximum(1.0, scales)
    bad = np.abs(values) > bound
    if not bad.any():
        return ZeroVerdict(Tier.PROBABLY_ZERO)
    i = int(np.argmax(np.abs(values) / bound))
    witness = {k: float(v[i]) for k, v in points.items()}
    return ZeroVerdict(Tier.NONZERO, witness, float(values[i]))


def is_nonzero_everywhere(e: Expr, plan: SamplePlan | None = None) -> ZeroVerdict | None:
    """``None`` if ``|e| > tol`` at every sample, else a verdict carrying the
    sample where ``e`` (nearly) vanishes."""
    plan = plan or SamplePlan()
    if e.is_zero_literal():
        return ZeroVerdict(Tier.PROVEN_ZERO)
    if len(e.terms) == 1 and not e.terms[0][0].factors and e.terms[0][0].trig is None:
        return None  # c * exp(...) never vanishes, however small it gets numerically
    points, values, _ = sample_values(e, plan)
    small = np.abs(values) <= plan.tol
    if not small.any():
        return None
    i = int(np.argmax(small))
    return ZeroVerdict(Tier.PROBABLY_ZERO, {k: float(v[i]) for k, v in points.items()},
                       float(values[i]))


def evaluate_at(e: Expr, point: Mapping[str, float]) -> float:
    with np.errstate(all="ignore"):
        return float(e.evaluate(dict(point)))
