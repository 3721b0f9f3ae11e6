#!/usr/bin/env python3
"""Run the bundled acceptance config and print a one-line verdict per scenario."""
import json
import sys
from pathlib import Path

from dirichlet_rwa.cli import main

ROOT = Path(__file__).resolve().parent.parent


if __name__ == "__main__":
    out = ROOT / "reports"
    code = main(
        ["run", "--config", str(ROOT / "configs" / "acceptance.json"), "--out", str(out)]
    )
    for path in sorted(out.glob("*.json")):
        rep = json.loads(path.read_text())
        verdict = "PASS" if rep["overall_pass"] else "FAIL"
        print(f"{rep['scenario_id']}: {verdict} ({len(rep['tests'])} checks)")
    sys.exit(code)
