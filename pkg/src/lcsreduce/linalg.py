"""Linear algebra over the fraction field of scalar expressions.

Pivots are validated with :func:`is_zero` before any division: among the
candidate entries of a column, the one with the largest sample magnitude is
used (a symbolic analogue of partial pivoting). Exact constants come first and
single-term entries next, since dividing by them never creates an opaque
denominator. Entries whose verdict is ProbablyZero are treated as zero and
never divided by.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .symbolic import ONE, ZERO, Expr, SamplePlan, is_zero
from .symbolic.zero import sample_values

Matrix = list[list[Expr]]


class InconsistentSystem(ValueError):
    def __init__(self, row: int, residual: Expr):
        super().__init__(f"inconsistent linear system: equation {row} reduces to 0 = {residual}")
        self.row = row
        self.residual = residual


@dataclass
class Elimination:
    """Reduced row echelon form together with its pivot columns."""

    rows: Matrix
    pivots: list[int]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _magnitude(e: Expr, plan: SamplePlan) -> tuple[int, float]:
    """Pivot score ``(class, largest sample magnitude)``; ``(0, 0.0)`` when the
    entry is (probably) zero. Classes: 3 constant, 2 single trig-free term, 1 other."""
    if e.is_zero_literal():
        return (0, 0.0)
    c = e.constant_value()
    if c is not None:
        return (3, float(abs(c)))
    _, values, scales = sample_values(e, plan)
    bound = plan.tol * np.maximum(1.0, scales)
    if not (np.abs(values) > bound).any():
        return (0, 0.0)
    cheap = len(e.terms) == 1 and e.terms[0][0].trig is None
    return (2 if cheap else 1, float(np.max(np.abs(values))))


def row_reduce(M: Sequence[Sequence[Expr]], plan: SamplePlan, ncols: int | None = None) -> Elimination:
    """Gauss-Jordan elimination over the first ``ncols`` columns (all by default)."""
    A = [list(r) for r in M]
    if not A:
        return Elimination([], [])
    m, n = len(A), len(A[0])
    ncols = n if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        best, best_mag = None, (0, 0.0)
        for i in range(r, m):
            mag = _magnitude(A[i][c], plan)
            if mag[0] == 0:
                A[i][c] = ZERO
            elif mag > best_mag:
                best, best_mag = i, mag
        if best is None:
            continue
        A[r], A[best] = A[best], A[r]
        piv = A[r][c]
        A[r] = [ZERO if j == c else (x / piv if x.terms else x) for j, x in enumerate(A[r])]
        A[r][c] = ONE
        for i in range(m):
            if i == r or A[i][c].is_zero_literal():
                continue
            f = A[i][c]
            A[i] = [ZERO if j == c else (A[i][j] - f * A[r][j] if A[r][j].terms else A[i][j])
                    for j in range(n)]
        pivots.append(c)
        r += 1
    return Elimination(A, pivots)


def nullspace(M: Sequence[Sequence[Expr]], plan: SamplePlan) -> list[list[Expr]]:
    """Basis of the kernel: one vector per free column, with 1 in that column."""
    if not M:
        return []
    n = len(M[0])
    ech = row_reduce(M, plan)
    free = [c for c in range(n) if c not in ech.pivots]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row, p in zip(ech.rows, ech.pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(A: Sequence[Sequence[Expr]], b: Sequence[Expr], plan: SamplePlan) -> list[Expr]:
    """Unique solution of ``A x = b``; raises :class:`InconsistentSystem` or
    ``ValueError`` when the solution is not unique."""
    n = len(A[0])
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    ech = row_reduce(aug, plan, ncols=n)
    for i in range(ech.rank, len(aug)):
        res = ech.rows[i][n]
        if not is_zero(res, plan).is_zero:
            raise InconsistentSystem(i, res)
    if ech.rank < n:
        raise ValueError(f"solution not unique: rank {ech.rank} < {n} unknowns")
    x = [ZERO] * n
    for row, p in zip(ech.rows, ech.pivots):
        x[p] = row[n]
    return x


def pfaffian(A: Sequence[Sequence[Expr]]) -> Expr:
    """Exact Pfaffian of a skew-symmetric matrix by expansion along the first row."""
    n = len(A)
    if n % 2:
        return ZERO
    memo: dict[tuple[int, ...], Expr] = {}

    def pf(idx: tuple[int, ...]) -> Expr:
        if not idx:
            return ONE
        if idx in memo:
            return memo[idx]
        i, rest = idx[0], idx[1:]
        out = ZERO
        for k, j in enumerate(rest):
            a = A[i][j]
            if a.is_zero_literal():
                continue
            term = a * pf(rest[:k] + rest[k + 1:])
            out = out + (term if k % 2 == 0 else -term)
        memo[idx] = out
        return out

    return pf(tuple(range(n)))


def numeric_matrices(M: Sequence[Sequence[Expr]], points: dict[str, np.ndarray]) -> np.ndarray:
    """Stack of numeric matrices, shape ``(samples, rows, cols)``."""
    count = len(next(iter(points.values()))) if points else 1
    rows, cols = len(M), len(M[0]) if M else 0
    out = np.zeros((count, rows, cols))
    memo: dict = {}
    with np.errstate(all="ignore"):
        for i in range(rows):
            for j in range(cols):
                e = M[i][j]
                if e.terms:
                    out[:, i, j] = e.evaluate(points, memo)
    return out


def numeric_ranks(M: Sequence[Sequence[Expr]], points: dict[str, np.ndarray]) -> np.ndarray:
    """Rank at each sample, with the tolerance relative to that sample's largest
    entry so a common factor like ``exp(-50)`` does not read as rank 0. Entries
    that are cancellation noise relative to their own terms count as 0."""
    count = len(next(iter(points.values()))) if points else 1
    rows, cols = len(M), len(M[0]) if M else 0
    mats = np.zeros((count, rows, cols))
    memo: dict = {}
    with np.errstate(all="ignore"):
        for i in range(rows):
            for j in range(cols):
                e = M[i][j]
                if not e.terms:
                    continue
                parts = e.term_values(points, memo)
                value = np.broadcast_to(sum(parts), (count,))
                scale = np.broadcast_to(sum(np.abs(p) for p in parts), (count,))
                mats[:, i, j] = np.where(np.abs(value) <= 1e-10 * scale, 0.0, value)
    ranks = np.zeros(count, dtype=int)
    for k, m in enumerate(mats):
        top = float(np.max(np.abs(m))) if m.size else 0.0
        if top > 0:
            ranks[k] = np.linalg.matrix_rank(m, tol=1e-8 * top)
    return ranks


def sample_ranks(M: Sequence[Sequence[Expr]], plan: SamplePlan, names: Sequence[str]):
    """Numeric rank of ``M`` at each sample point; returns ``(ranks, points)``."""
    points = plan.draw(names)
    if not M or not M[0]:
        return np.zeros(plan.samples, dtype=int), points
    return numeric_ranks(M, points), points
