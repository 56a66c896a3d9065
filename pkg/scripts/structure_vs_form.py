"""Form-level and structure-level reduction side by side on every flattened fixture,
plus the periodic-leaf family exp(c*th)*Omega0 for a few values of c.

    python3 scripts/structure_vs_form.py
"""
from __future__ import annotations

import argparse
import json
from dataclasses import dataclass

from lcsreduce.fixtures import lcs_fixtures, periodic_leaf
from lcsreduce.lcs import LcsStructure
from lcsreduce.reduction import ReductionHypothesisError, reduce_form, reduce_structure
from lcsreduce.symbolic import SamplePlan


@dataclass
class CompareConfig:
    seed: int = 0
    samples: int = 25
    periodic_c: tuple[int, ...] = (1, 2, -3)
    as_json: bool = False


def compare(cfg: CompareConfig) -> list[dict]:
    plan = SamplePlan(samples=cfg.samples, seed=cfg.seed)
    fixtures = [fx for fx in lcs_fixtures() if fx.foliation is not None]
    fixtures += [periodic_leaf(c) for c in cfg.periodic_c if c != 1]
    rows = []
    for fx in fixtures:
        S = LcsStructure.from_form(fx.Omega, plan)
        row = {"fixture": fx.name, "rank": fx.rank}
        try:
            rf = reduce_form(S, fx.embedding, fx.foliation, plan)
            rs = reduce_structure(S, fx.embedding, fx.foliation, plan)
        except ReductionHypothesisError as exc:
            row.update(form="skipped", structure="skipped", note=str(exc))
            rows.append(row)
            continue
        row.update(form=rf.verdict, structure=rs.verdict)
        if not rs.reduced:
            row["obstruction"] = rs.certificate
        rows.append(row)
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--json", dest="as_json", action="store_true")
    cfg = CompareConfig(**vars(p.parse_args()))
    rows = compare(cfg)
    if cfg.as_json:
        print(json.dumps(rows, indent=2))
        return
    width = max(len(r["fixture"]) for r in rows)
    print(f"{'fixture':<{width}}  rank  form        structure")
    for r in rows:
        extra = ""
        if "obstruction" in r:
            extra = f"  circle mean {r['obstruction'].get('mean')}"
        print(f"{r['fixture']:<{width}}  {r['rank']:>4}  {r['form']:<10}  {r['structure']}{extra}")


if __name__ == "__main__":
    main()
