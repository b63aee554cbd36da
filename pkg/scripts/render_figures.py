#!/usr/bin/env python3
"""Render the restricted-regression figures for the two worked datasets.

Each figure shows the scatter, the centroid, the two confocal conics
through the restriction point, and the best/worst fitted lines through it.
Output lands in figures/.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from confocalfit.cli import run_command  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIGURES = ROOT / "figures"


def main() -> None:
    FIGURES.mkdir(exist_ok=True)
    jobs = [
        (
            "cells_restricted.svg",
            [
                "plot", str(ROOT / "data" / "cells.csv"),
                "--cols", "X,Y", "--through", "0,0",
            ],
        ),
        (
            "forbes_restricted.svg",
            [
                "plot", str(ROOT / "data" / "forbes.csv"),
                "--through", "201.5,24.5",
            ],
        ),
    ]
    for name, argv in jobs:
        target = FIGURES / name
        report, code = run_command([*argv, "--out", str(target)])
        if code != 0:
            raise SystemExit(f"rendering {name} failed: {report}")
        print(f"wrote {target}")


if __name__ == "__main__":
    main()
