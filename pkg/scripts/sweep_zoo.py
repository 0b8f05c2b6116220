#!/usr/bin/env python3
"""Sweep every built-in surface and drop JSON + CSV reports in out/.

Usage: python scripts/sweep_zoo.py [out_dir]
"""

import json
import math
import sys
from pathlib import Path

import numpy as np

from cvlab.cli import report_to_csv, report_to_json_dict
from cvlab.sweep import geometric_schedule, run_sweep
from cvlab.zoo import zoo_entry, zoo_names

DEEP = geometric_schedule(0.0, 10)
SHALLOW = list(np.geomspace(0.5, 64.0, 12))


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    out_dir.mkdir(parents=True, exist_ok=True)
    print(f"{'surface':<14} {'chi':>3} {'h1':>10} {'L':>12} {'c_total':>12} {'margin':>12}  verdicts")
    for name in zoo_names():
        entry = zoo_entry(name)
        schedule = DEEP if entry.oracle.hypothesis_holds else SHALLOW
        report = run_sweep(entry.model, schedule)
        (out_dir / f"{name}.json").write_text(
            json.dumps(report_to_json_dict(report), indent=2) + "\n"
        )
        (out_dir / f"{name}.csv").write_text(report_to_csv(report))
        margin = (
            2 * math.pi * report.chi - report.c_total
            if report.c_total is not None
            else float("nan")
        )
        failures = [k for k, v in report.verdicts.items() if v.status == "fail"]
        print(
            f"{name:<14} {report.chi:>3} "
            f"{report.h1 if report.h1 is not None else 'none':>10} "
            f"{report.limit.value if report.limit else float('nan'):>12.4e} "
            f"{report.c_total if report.c_total is not None else float('nan'):>12.6f} "
            f"{margin:>12.4e}  "
            + (", ".join(failures) if failures else "all pass/n-a")
        )
    print(f"\nreports written to {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
