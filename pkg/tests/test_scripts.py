import json
import os
import subprocess
import sys

import pytest

SCRIPTS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "scripts")


def run(name, *args):
    proc = subprocess.run([sys.executable, os.path.join(SCRIPTS, name), *args],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def test_reproduce_example():
    out = json.loads(run("reproduce_example.py", "--json", "--random", "1"))
    rows = {r["f"]: r for r in out["rows"]}
    assert rows["y1"]["form"] == "Obstructed" and rows["y1"]["structure"] == "Reduced"
    assert rows["x2"]["form"] == "Reduced"


def test_structure_vs_form():
    rows = json.loads(run("structure_vs_form.py", "--json"))
    periodic = [r for r in rows if r["fixture"].startswith("periodic")]
    assert periodic and all(r["structure"] == "Obstructed" for r in periodic)
    assert all(r["structure"] in ("Reduced", "skipped") for r in rows
               if not r["fixture"].startswith("periodic"))


@pytest.mark.parametrize("name", ["plane p=1", "R6 p=2"])
def test_homotopy_demo(name):
    out = run("homotopy_demo.py", "--name", name)
    assert f"== {name}" in out and "identity holds: True" in out
