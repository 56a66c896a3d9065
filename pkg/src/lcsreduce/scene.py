"""Scene files: charts, LCS forms, submanifolds, foliations and contractions.

A scene is a sectioned text file::

    # Darboux model with f = y1
    [chart M]
    coords = x1, y1, x2, y2, x3, y3

    [lcs main]
    chart = M
    omega = exp(y1)*(dx1^dy1 + dx2^dy2 + dx3^dy3)

    [submanifold Q]
    chart = M
    coords = y1, x2, y2, x3, y3
    components = 0, y1, x2, y2, x3, y3

    [foliation F]
    chart = Q
    leaves = y1

Lines are ``key = value``; an indented line continues the previous value.
A submanifold's name also refers to its own chart (the source). Other
blocks: ``[contraction NAME]`` (``foliation``, ``components`` in the chart
coordinates and ``t``, ``slice`` as ``name = value; ...``), ``[form NAME]``
(``chart``, ``form``) and ``[sample]`` (``samples``, ``seed``, ``tol``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .foliation import TIME, ContractionFamily, FlattenedFoliation
from .forms import Chart, DifferentialForm
from .geometry import Embedding
from .lcs import LcsStructure
from .symbolic import Expr, SamplePlan, parse, parse_form
from .symbolic.parser import ParseError

_HEADER = re.compile(r"^\[\s*([a-z]+)(?:\s+([A-Za-z][A-Za-z0-9_]*))?\s*\]\s*$")
_KEY = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)\s*=\s*(.*)$")

KINDS = {
    "chart": ({"coords"}, {"periodic"}),
    "lcs": ({"chart", "omega"}, {"lee"}),
    "submanifold": ({"chart", "coords", "components"}, {"periodic"}),
    "foliation": ({"chart", "leaves"}, set()),
    "contraction": ({"foliation", "components", "slice"}, set()),
    "form": ({"chart", "form"}, set()),
    "sample": (set(), {"samples", "seed", "tol"}),
}


class SceneError(ValueError):
    """Parse or validation failure, located at ``line``/``column`` (1-based)."""

    def __init__(self, message: str, line: int = 0, column: int = 0, path: str = ""):
        where = f"{path or '<scene>'}:{line}:{column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass
class _Value:
    text: str
    line: int
    column: int


@dataclass
class _Block:
    kind: str
    name: str
    line: int
    values: dict[str, _Value] = field(default_factory=dict)


@dataclass
class Scene:
    path: str = ""
    charts: dict[str, Chart] = field(default_factory=dict)
    lcs_forms: dict[str, DifferentialForm] = field(default_factory=dict)
    lcs_lee: dict[str, DifferentialForm | None] = field(default_factory=dict)
    structures: dict[str, LcsStructure] = field(default_factory=dict)
    submanifolds: dict[str, Embedding] = field(default_factory=dict)
    foliations: dict[str, FlattenedFoliation] = field(default_factory=dict)
    contractions: dict[str, ContractionFamily] = field(default_factory=dict)
    forms: dict[str, DifferentialForm] = field(default_factory=dict)
    plan: SamplePlan = field(default_factory=SamplePlan)

    def structure(self, name: str, plan: SamplePlan | None = None) -> LcsStructure:
        """Validated LCS structure (computed on first use when loading was lazy)."""
        if name not in self.lcs_forms:
            raise KeyError(f"no [lcs {name}] block in scene")
        if name not in self.structures:
            self.structures[name] = LcsStructure.from_form(
                self.lcs_forms[name], plan or self.plan, lee=self.lcs_lee[name])
        return self.structures[name]

    def summary(self) -> dict:
        return {"charts": sorted(self.charts), "lcs": sorted(self.lcs_forms),
                "submanifolds": sorted(self.submanifolds), "foliations": sorted(self.foliations),
                "contractions": sorted(self.contractions), "forms": sorted(self.forms)}


def _split_blocks(text: str, path: str) -> list[_Block]:
    blocks: list[_Block] = []
    last: _Value | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if raw[:1].isspace() and last is not None and not line.lstrip().startswith("["):
            last.text += " " + line.strip()
            continue
        stripped = line.strip()
        col = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m:
                raise SceneError(f"malformed section header {stripped!r}", lineno, col, path)
            kind, name = m.group(1), m.group(2) or ""
            if kind not in KINDS:
                raise SceneError(f"unknown section kind {kind!r}", lineno, col + 1, path)
            if kind != "sample" and not name:
                raise SceneError(f"[{kind}] needs a name", lineno, col, path)
            blocks.append(_Block(kind, name, lineno))
            last = None
            continue
        m = _KEY.match(stripped)
        if not m:
            raise SceneError("expected 'key = value'", lineno, col, path)
        if not blocks:
            raise SceneError("key outside of any section", lineno, col, path)
        key, value = m.group(1), m.group(2)
        block = blocks[-1]
        if key in block.values:
            raise SceneError(f"duplicate key {key!r}", lineno, col, path)
        last = _Value(value, lineno, col + m.start(2))
        block.values[key] = last
    if not blocks:
        raise SceneError("empty scene: no sections found", 1, 1, path)
    return blocks


def _names(v: _Value) -> list[str]:
    return [p.strip() for p in v.text.split(",") if p.strip()]


class _Loader:
    def __init__(self, path: str, eager: bool):
        self.path = path
        self.eager = eager
        self.scene = Scene(path=path)
        self.owners: dict[str, str] = {}

    def error(self, message: str, v: _Value | _Block) -> SceneError:
        col = getattr(v, "column", 1)
        return SceneError(message, v.line, col, self.path)

    def expr(self, v: _Value, chart, offset_text: str | None = None) -> Expr:
        text = v.text if offset_text is None else offset_text
        try:
            return parse(text, chart)
        except ParseError as exc:
            raise SceneError(str(exc), v.line, v.column + exc.offset, self.path) from None

    def form(self, v: _Value, chart: Chart, degree: int | None = None) -> DifferentialForm:
        try:
            return parse_form(v.text, chart, degree)
        except ParseError as exc:
            raise SceneError(str(exc), v.line, v.column + exc.offset, self.path) from None

    def chart_ref(self, v: _Value) -> Chart:
        name = v.text.strip()
        if name in self.scene.charts:
            return self.scene.charts[name]
        if name in self.scene.submanifolds:
            return self.scene.submanifolds[name].source
        raise self.error(f"unknown chart {name!r}", v)

    def claim(self, name: str, block: _Block) -> None:
        if name in self.owners:
            raise self.error(f"name {name!r} already used by a [{self.owners[name]}] block", block)
        self.owners[name] = block.kind

    def components(self, v: _Value, names) -> list[Expr]:
        out, pos = [], 0
        for part in v.text.split(","):
            lead = len(part) - len(part.lstrip())
            sub = _Value(part.strip(), v.line, v.column + pos + lead)
            if not sub.text:
                raise self.error("empty component", sub)
            out.append(self.expr(sub, names))
            pos += len(part) + 1
        return out

    def load(self, blocks: list[_Block]) -> Scene:
        for b in blocks:
            required, optional = KINDS[b.kind]
            missing = required - set(b.values)
            if missing:
                raise self.error(f"[{b.kind} {b.name}] is missing {sorted(missing)}", b)
            extra = set(b.values) - required - optional
            if extra:
                k = sorted(extra)[0]
                raise self.error(f"unknown key {k!r} in [{b.kind}]", b.values[k])
            if b.kind != "sample":
                self.claim(b.name, b)
            getattr(self, "_" + b.kind)(b)
        return self.scene

    def _wrap(self, b: _Block, key: str | None, fn):
        try:
            return fn()
        except SceneError:
            raise
        except (ValueError, KeyError, ArithmeticError) as exc:
            at = b.values[key] if key else b
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
            raise self.error(f"[{b.kind} {b.name}] {type(exc).__name__}: {msg}", at) from None

    def _sample(self, b: _Block):
        kw = {}
        for key, cast in (("samples", int), ("seed", int), ("tol", float)):
            if key in b.values:
                try:
                    kw[key] = cast(b.values[key].text)
                except ValueError:
                    raise self.error(f"{key} must be a number", b.values[key]) from None
        self.scene.plan = self._wrap(b, None, lambda: SamplePlan(**kw))

    def _chart(self, b: _Block):
        periodic = _names(b.values["periodic"]) if "periodic" in b.values else []
        chart = self._wrap(b, "coords", lambda: Chart(tuple(_names(b.values["coords"])),
                                                        frozenset(periodic), b.name))
        self.scene.charts[b.name] = chart

    def _lcs(self, b: _Block):
        chart = self.chart_ref(b.values["chart"])
        omega = self.form(b.values["omega"], chart, 2)
        lee = self.form(b.values["lee"], chart, 1) if "lee" in b.values else None
        self.scene.lcs_forms[b.name] = omega
        self.scene.lcs_lee[b.name] = lee
        if self.eager:
            self._wrap(b, "omega", lambda: self.scene.structure(b.name))

    def _submanifold(self, b: _Block):
        target = self.chart_ref(b.values["chart"])
        periodic = _names(b.values["periodic"]) if "periodic" in b.values else []
        source = self._wrap(b, "coords", lambda: Chart(tuple(_names(b.values["coords"])),
                                                         frozenset(periodic), b.name))
        comps = self.components(b.values["components"], source)
        if len(comps) != target.dim:
            raise self.error(f"{len(comps)} components for a {target.dim}-dimensional target",
                             b.values["components"])
        emb = Embedding.from_components(source, target, comps)
        self._wrap(b, "components", lambda: emb.check_immersion(self.scene.plan))
        self.scene.submanifolds[b.name] = emb

    def _foliation(self, b: _Block):
        chart = self.chart_ref(b.values["chart"])
        leaves = _names(b.values["leaves"])
        self.scene.foliations[b.name] = self._wrap(
            b, "leaves", lambda: FlattenedFoliation(chart, tuple(leaves)))

    def _contraction(self, b: _Block):
        v = b.values["foliation"]
        F = self.scene.foliations.get(v.text.strip())
        if F is None:
            raise self.error(f"unknown foliation {v.text.strip()!r}", v)
        names = F.chart.coords + (TIME,)
        comps = self.components(b.values["components"], names)
        sv = b.values["slice"]
        fixed = {}
        for part in sv.text.split(";"):
            if not part.strip():
                continue
            if "=" not in part:
                raise self.error("slice entries look like 'name = value'", sv)
            k, val = (p.strip() for p in part.split("=", 1))
            fixed[k] = self.expr(sv, (), val)
        C = self._wrap(b, "components", lambda: ContractionFamily(F, tuple(comps), fixed))
        if self.eager:
            self._wrap(b, "components", lambda: C.validate(self.scene.plan))
        self.scene.contractions[b.name] = C

    def _form(self, b: _Block):
        chart = self.chart_ref(b.values["chart"])
        self.scene.forms[b.name] = self.form(b.values["form"], chart)


def loads(text: str, path: str = "", eager: bool = True) -> Scene:
    """Parse and validate scene text. With ``eager=False`` LCS blocks are only
    parsed; :meth:`Scene.structure` validates them on demand."""
    return _Loader(path, eager).load(_split_blocks(text, path))


def bundled_scenes() -> list[str]:
    root = resources.files("lcsreduce") / "scenes"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".scene"))


def resolve_path(path: str | Path) -> Path:
    """A filesystem path, or the name of a scene bundled with the package."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("lcsreduce") / "scenes" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"scene file {str(path)!r} not found")


def load_scene(path: str | Path, eager: bool = True) -> Scene:
    p = resolve_path(path)
    return loads(p.read_text(), str(path), eager)


__all__ = ["Scene", "SceneError", "load_scene", "loads", "bundled_scenes", "resolve_path"]
