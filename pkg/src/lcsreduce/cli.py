"""``lcsreduce`` command line: run one operation on a scene, print a JSON report.

Exit codes: 0 for a passing check or a Reduced/ZeroClass verdict, 2 for a
negative mathematical outcome (Obstructed, NotEquivalent, a failed check),
1 for errors. Reports are JSON on every path.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import replace

from . import __version__
from .foliation import h1_class_decide, homotopy_operator, leaf_restriction_check
from .geometry import RankNotConstant, characteristic_distribution, involutivity_check, restrict
from .lcs import Degenerate, NotLCS
from .reduction import PreconditionFailed, reduce_form, reduce_structure, verify_conformal_invariance
from .scene import Scene, load_scene
from .symbolic import SamplePlan

SCHEMA_VERSION = 1
COMMANDS = ("check-lcs", "lee-form", "char-dist", "involutive", "tangential-class", "homotopy",
            "reduce-form", "reduce-structure", "invariance")


class UsageError(ValueError):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _clean(x):
    """JSON-safe copy: non-finite floats become strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _pick(kind: str, table: dict, name: str | None):
    if name is not None:
        if name not in table:
            raise UsageError(f"no {kind} named {name!r}; available: {sorted(table)}")
        return name, table[name]
    if len(table) == 1:
        return next(iter(table.items()))
    raise UsageError(f"--{kind} is required (scene has {sorted(table) or 'none'})")


def _lcs(scene: Scene, args, plan, index: int = 0):
    names = args.lcs or []
    name = names[index] if index < len(names) else None
    if name is None and index > 0:
        raise UsageError("invariance needs two --lcs names")
    name, _ = _pick("lcs", scene.lcs_forms, name)
    return name, scene.structure(name, plan)


def _sub(scene, args):
    return _pick("sub", scene.submanifolds, args.sub)


def _fol(scene, args):
    return _pick("fol", scene.foliations, args.fol)


def cmd_check_lcs(scene, args, plan):
    name, _ = _pick("lcs", scene.lcs_forms, (args.lcs or [None])[0])
    try:
        S = scene.structure(name, plan)
    except (NotLCS, Degenerate) as exc:
        return 2, {"lcs": name, "verdict": "fail", "reason": type(exc).__name__,
                   "message": str(exc)}
    return 0, {"lcs": name, "verdict": "pass", "structure": S.to_dict()}


def cmd_lee_form(scene, args, plan):
    name, S = _lcs(scene, args, plan)
    return 0, {"lcs": name, "lee_form": str(S.lee)}


def cmd_char_dist(scene, args, plan):
    name, S = _lcs(scene, args, plan)
    sub, iota = _sub(scene, args)
    try:
        frame = characteristic_distribution(iota, S.Omega, plan)
    except RankNotConstant as exc:
        return 2, {"verdict": "RankNotConstant", "ranks": list(exc.ranks),
                   "witnesses": list(exc.points)}
    return 0, {"lcs": name, "sub": sub, "verdict": "pass", "rank": frame.rank,
               "frame": [str(X) for X in frame.fields],
               "sample_ranks_of_pullback": list(frame.sample_ranks),
               "constant_rank_certified_on": "samples"}


def cmd_involutive(scene, args, plan):
    name, S = _lcs(scene, args, plan)
    sub, iota = _sub(scene, args)
    frame = characteristic_distribution(iota, S.Omega, plan)
    report = involutivity_check(frame, restrict(iota, S.Omega), plan)
    return (0 if report.involutive else 2), {"lcs": name, "sub": sub, **report.to_dict()}


def _one_form(scene, args, plan, F):
    if args.form:
        form = scene.forms.get(args.form)
        if form is None:
            raise UsageError(f"no form named {args.form!r}")
        return args.form, form
    name, S = _lcs(scene, args, plan)
    _, iota = _sub(scene, args)
    if iota.source != F.chart:
        raise UsageError("the foliation is not on the submanifold's chart")
    return f"pullback of lee({name})", restrict(iota, S.lee)


def cmd_tangential_class(scene, args, plan):
    fol, F = _fol(scene, args)
    label, omega = _one_form(scene, args, plan, F)
    report = h1_class_decide(omega, F, plan)
    out = {"fol": fol, "form": label, **report.to_dict()}
    if report.zero_class:
        out["leaf_check"] = leaf_restriction_check(omega, F, report, plan).to_dict()
    return (0 if report.zero_class else 2), out


def cmd_homotopy(scene, args, plan):
    name, C = _pick("contraction", scene.contractions, args.contraction)
    if args.form:
        label, omega = args.form, scene.forms.get(args.form)
        if omega is None:
            raise UsageError(f"no form named {args.form!r}")
    else:
        label, omega = _one_form(scene, args, plan, C.foliation)
    result = homotopy_operator(omega, C, plan, strict=False)
    ok = result.hypothesis_holds and result.identity_holds and result.residual_leafwise_vanishing
    return (0 if ok else 2), {"contraction": name, "form": label,
                              "verdict": "pass" if ok else "fail", **result.to_dict()}


def _reduce(fn, scene, args, plan):
    name, S = _lcs(scene, args, plan)
    sub, iota = _sub(scene, args)
    fol, F = _fol(scene, args)
    report = fn(S, iota, F, plan)
    return (0 if report.reduced else 2), {"lcs": name, "sub": sub, "fol": fol, **report.to_dict()}


def cmd_reduce_form(scene, args, plan):
    return _reduce(reduce_form, scene, args, plan)


def cmd_reduce_structure(scene, args, plan):
    return _reduce(reduce_structure, scene, args, plan)


def cmd_invariance(scene, args, plan):
    n1, S1 = _lcs(scene, args, plan, 0)
    n2, S2 = _lcs(scene, args, plan, 1)
    sub, iota = _sub(scene, args)
    fol, F = _fol(scene, args)
    head = {"lcs": [n1, n2], "sub": sub, "fol": fol}
    try:
        report = verify_conformal_invariance(S1, S2, iota, F, plan)
    except PreconditionFailed as exc:
        return 2, {**head, "verdict": "NotEquivalent", "message": str(exc)}
    return (0 if report.passed else 2), {**head, **report.to_dict()}


HANDLERS = {c: globals()["cmd_" + c.replace("-", "_")] for c in COMMANDS}


def build_parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(prog="lcsreduce",
                        description="Run one operation on a scene and print a JSON report.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("scene", help="scene file, or the name of a bundled scene")
    p.add_argument("--lcs", action="append", help="LCS block (give twice for invariance)")
    p.add_argument("--sub", help="submanifold block")
    p.add_argument("--fol", help="foliation block")
    p.add_argument("--contraction", help="contraction block")
    p.add_argument("--form", help="form block used by tangential-class and homotopy")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _plan(scene: Scene, args) -> SamplePlan:
    plan = scene.plan
    seed = args.seed
    if seed is None and os.environ.get("LCSREDUCE_SEED"):
        seed = int(os.environ["LCSREDUCE_SEED"])
    changes = {k: v for k, v in (("seed", seed), ("samples", args.samples), ("tol", args.tol))
               if v is not None}
    return replace(plan, **changes) if changes else plan


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    """Parse arguments and execute; returns ``(exit_code, report)``."""
    start = time.perf_counter()
    report = {"schema_version": SCHEMA_VERSION}
    try:
        args = build_parser().parse_args(argv)
        report.update(command=args.command, scene=args.scene)
        scene = load_scene(args.scene, eager=args.command != "check-lcs")
        plan = _plan(scene, args)
        report["sample_plan"] = {"samples": plan.samples, "seed": plan.seed, "tol": plan.tol}
        code, result = HANDLERS[args.command](scene, args, plan)
        report.update(status="ok", result=result)
    except Exception as exc:  # every failure still yields a JSON report
        code = 1
        report.update(status="error", error={"type": type(exc).__name__, "message": str(exc)})
    report["exit_code"] = code
    report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    return code, _clean(report)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    pretty = "--pretty" in argv
    code, report = run(argv)
    print(json.dumps(report, sort_keys=True, indent=2 if pretty else None))
    return code


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["main", "run", "build_parser", "COMMANDS", "SCHEMA_VERSION"]
