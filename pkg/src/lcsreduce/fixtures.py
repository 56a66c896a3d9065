"""Worked LCS configurations shared by the tests, the acceptance suite and scripts.

Each :class:`LcsFixture` bundles an LCS form, a submanifold with constant-rank
characteristic distribution and, when the submanifold is presented in a
flattened chart, the matching foliation.
"""
from __future__ import annotations

from dataclasses import dataclass

from .foliation import ContractionFamily, FlattenedFoliation
from .forms import Chart, DifferentialForm, SmoothMap, pullback
from .geometry import Embedding
from .symbolic import Expr, as_expr, parse, parse_form, var


def darboux_chart(n: int, periodic: tuple[str, ...] = (), names: dict | None = None) -> Chart:
    names = names or {}
    coords = []
    for i in range(1, n + 1):
        coords += [names.get(f"x{i}", f"x{i}"), names.get(f"y{i}", f"y{i}")]
    return Chart(tuple(coords), frozenset(periodic), f"R{2 * n}")


def darboux_form(chart: Chart) -> DifferentialForm:
    """``sum dx_i ^ dy_i`` over consecutive coordinate pairs."""
    c = chart.coords
    terms = {(2 * i, 2 * i + 1): 1 for i in range(len(c) // 2)}
    return DifferentialForm(chart, 2, terms)


def conformal_darboux(chart: Chart, f: str | Expr) -> DifferentialForm:
    """``exp(f) * sum dx_i ^ dy_i`` with Lee form ``df``."""
    from .symbolic import exp

    f = parse(f, chart) if isinstance(f, str) else f
    return darboux_form(chart) * exp(f)


@dataclass
class LcsFixture:
    name: str
    Omega: DifferentialForm
    embedding: Embedding
    rank: int
    foliation: FlattenedFoliation | None = None
    affine: bool = True
    note: str = ""

    @property
    def chart(self) -> Chart:
        return self.Omega.chart


def _slice(chart: Chart, fixed: dict) -> Embedding:
    return Embedding.slice(chart, {k: as_expr(v) for k, v in fixed.items()}, "Q")


def darboux_hypersurface(f: str = "y1") -> LcsFixture:
    """Darboux model ``exp(f) Omega0`` on R^6, hypersurface ``x1 = 0``."""
    M = darboux_chart(3)
    iota = _slice(M, {"x1": 0})
    return LcsFixture(f"darboux[f={f}]", conformal_darboux(M, f), iota, 1,
                      FlattenedFoliation(iota.source, ("y1",)))


def coisotropic_slice(n: int, k: int, f: str = "0") -> LcsFixture:
    """``{x1 = ... = xk = 0}`` in R^{2n}; characteristic leaves along y1..yk."""
    M = darboux_chart(n)
    iota = _slice(M, {f"x{i}": 0 for i in range(1, k + 1)})
    F = FlattenedFoliation(iota.source, tuple(f"y{i}" for i in range(1, k + 1)))
    return LcsFixture(f"slice[n={n},k={k},f={f}]", conformal_darboux(M, f), iota, k, F)


def periodic_leaf(c: int = 1) -> LcsFixture:
    """Local representative ``exp(c*th) Omega0`` with periodic leaf coordinate ``th``.

    The restricted Lee form is ``c dth``; its circle mean along the leaf is
    ``c``. The coefficient ``exp(c*th)`` is not 2*pi-periodic, so this is a
    chart-level model only (see :func:`lcsreduce.lcs.periodicity_defects`).
    """
    M = darboux_chart(3, periodic=("th",), names={"y1": "th"})
    iota = Embedding.slice(M, {"x1": as_expr(0)}, "Q")
    F = FlattenedFoliation(iota.source, ("th",))
    return LcsFixture(f"periodic[c={c}]", conformal_darboux(M, f"{c}*th"), iota, 1, F,
                      affine=False)


def curved_hypersurface() -> LcsFixture:
    """Graph ``x1 = y2^2`` in ``(R^6, exp(x3) Omega0)``; frame is not coordinate."""
    M = darboux_chart(3)
    Q = Chart(("y1", "x2", "y2", "x3", "y3"), name="Q")
    comps = [parse(s, Q) for s in ("y2^2", "y1", "x2", "y2", "x3", "y3")]
    return LcsFixture("curved-hypersurface", conformal_darboux(M, "x3"),
                      Embedding.from_components(Q, M, comps), 1)


def curved_codim2() -> LcsFixture:
    """``{x1 = 0, x2 = sin(y3)}`` in ``(R^6, exp(y1 + x3) Omega0)``; rank 2."""
    M = darboux_chart(3)
    Q = Chart(("y1", "y2", "x3", "y3"), name="Q")
    comps = [parse(s, Q) for s in ("0", "y1", "sin(y3)", "y2", "x3", "y3")]
    return LcsFixture("curved-codim2", conformal_darboux(M, "y1 + x3"),
                      Embedding.from_components(Q, M, comps), 2)


def sheared(n: int = 4, k: int = 2) -> LcsFixture:
    """Pull ``exp(y1 + x_n) Omega0`` back by a polynomial shear that fixes
    ``x1..xk``; the slice ``{x1..xk = 0}`` keeps rank k but its characteristic
    frame has non-constant coefficients and nontrivial brackets."""
    M = darboux_chart(n)
    base = conformal_darboux(M, f"y1 + x{n}")
    comps = {c: var(c) for c in M.coords}
    comps["y1"] = var("y1") + var(f"x{n}") * var("y2")
    comps["y2"] = var("y2") + var("y1") ** 2
    comps[f"y{n}"] = var(f"y{n}") + var("y1") * var("y2")
    phi = SmoothMap(M, M, [comps[c] for c in M.coords])
    Omega = pullback(phi, base)
    iota = _slice(M, {f"x{i}": 0 for i in range(1, k + 1)})
    return LcsFixture(f"sheared[n={n},k={k}]", Omega, iota, k, affine=False)


def lcs_fixtures() -> list[LcsFixture]:
    """Constant-rank fixtures with ranks 1, 2 and 3."""
    return [
        darboux_hypersurface("y1"),
        darboux_hypersurface("x2"),
        darboux_hypersurface("x1*y1"),
        darboux_hypersurface("sin(y1) + x2"),
        coisotropic_slice(4, 1),
        coisotropic_slice(4, 2, "x3 + y4"),
        coisotropic_slice(3, 2, "x3"),
        coisotropic_slice(5, 3, "y1 + x4"),
        periodic_leaf(1),
        curved_hypersurface(),
        curved_codim2(),
        sheared(4, 2),
        sheared(4, 3),
    ]


def affine_reducible_fixtures() -> list[LcsFixture]:
    """Flattened, all-affine fixtures with reduced dimension > 2."""
    return [f for f in lcs_fixtures()
            if f.foliation is not None and f.affine
            and f.embedding.source.dim - f.rank > 2]


def non_involutive_form() -> tuple[Chart, DifferentialForm]:
    """``(dz - y dx) ^ dw`` on R^4: a rank-2 2-form that is not LCS; its kernel
    ``span{d/dy, d/dx + y d/dz}`` is not involutive."""
    R4 = Chart(("x", "y", "z", "w"))
    return R4, parse_form("(dz - y*dx)^dw", R4)


@dataclass
class ContractionFixture:
    name: str
    contraction: ContractionFamily
    form: DifferentialForm


def _scaling(chart: Chart, leaves: tuple[str, ...], centre: dict | None = None):
    """``F_t`` scaling the leaf coordinates towards ``centre`` (default 0)."""
    centre = {k: as_expr(v) for k, v in (centre or {}).items()}
    F = FlattenedFoliation(chart, leaves)
    t = var("t")
    comps = []
    for c in chart.coords:
        if c in leaves:
            c0 = centre.get(c, as_expr(0))
            comps.append(c0 + t * (var(c) - c0))
        else:
            comps.append(var(c))
    return ContractionFamily(F, tuple(comps), {s: centre.get(s, as_expr(0)) for s in leaves})


def contraction_fixtures() -> list[ContractionFixture]:
    """Linear leaf scalings on R^n (n <= 6) with forms of degree 0, 1 and 2.
    Every form is ``d(something)`` plus terms carrying a transverse index, so
    its differential vanishes on leaves."""
    R2 = Chart(("x", "y"))
    R3 = Chart(("x", "y", "z"))
    R4 = Chart(("x1", "y1", "x2", "y2"))
    R6 = darboux_chart(3)
    out = [
        ("plane p=1", _scaling(R2, ("y",)), parse_form("y*dx", R2)),
        ("plane p=0", _scaling(R2, ("y",)), parse_form("y^2", R2)),
        ("R3 p=0", _scaling(R3, ("y", "z")), parse_form("x*y*z + exp(x)*z^2", R3)),
        ("R3 p=1", _scaling(R3, ("y", "z")),
         parse_form("y*z*dx + x*z*dy + x*y*dz + y^2*dx", R3)),
        ("R3 p=2", _scaling(R3, ("z",)), parse_form("z*dx^dy + x*z*dx^dz", R3)),
        ("R4 p=1 shifted", _scaling(R4, ("y1", "y2"), {"y1": 1}),
         parse_form("2*y1*dy1 + y2*exp(x1)*dx1 + x2*dy2 + y2*dx2", R4)),
        ("R4 p=2", _scaling(R4, ("y1", "y2")),
         parse_form("exp(x1)*dy1^dy2 + y1*exp(x1)*dx1^dy2 + x2*y1*dx1^dx2", R4)),
        ("R6 p=1", _scaling(R6, ("y1", "y2", "y3")),
         parse_form("y1*y2*dy3 + y1*y3*dy2 + y2*y3*dy1 + sin(x1)*y1*dx2", R6)),
        ("R6 p=2", _scaling(R6, ("y1",)),
         parse_form("y1*dx2^dy2 + x3*dy1^dx1 + y1^2*dx1^dx3", R6)),
        ("R6 p=0", _scaling(R6, ("y1", "y2")), parse_form("y1^2*y2 + cos(x1)*y2", R6)),
    ]
    return [ContractionFixture(n, C, w) for n, C, w in out]


__all__ = [
    "LcsFixture", "ContractionFixture", "darboux_chart", "darboux_form", "conformal_darboux",
    "darboux_hypersurface", "coisotropic_slice", "periodic_leaf", "curved_hypersurface",
    "curved_codim2", "sheared", "lcs_fixtures", "affine_reducible_fixtures",
    "non_involutive_form", "contraction_fixtures",
]
