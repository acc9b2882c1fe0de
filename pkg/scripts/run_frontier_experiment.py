#!/usr/bin/env python3
"""End-to-end desk experiment on the shipped seeded corpus.

Synthesizes the default 15-title corpus, validates it, builds ladders for all
four methods, and emits the comparison report, the alpha-sweep frontier, and
the chroma-usage tables under results/. Plot-ready CSVs are written next to
each JSON report; plotting itself is left to external tools.
"""

import sys
from pathlib import Path

from chromaladder.cli import main

ROOT = Path(__file__).resolve().parent.parent
RESULTS = ROOT / "results"
PLAN = ROOT / "configs" / "fixed_plan.csv"
ALPHAS = ("0", "0.01", "0.02", "0.04", "0.08")


def sh(args):
    print(f"\n$ chromaladder {' '.join(args)}")
    code = main(list(args))
    if code != 0:
        sys.exit(code)


def run():
    RESULTS.mkdir(exist_ok=True)
    corpus = RESULTS / "corpus.csv"
    alpha_flags = [flag for a in ALPHAS for flag in ("--alpha", a)]

    sh(["synth", "--out", str(corpus)])
    sh(["validate", "--input", str(corpus)])
    sh([
        "optimize", "--input", str(corpus), *alpha_flags,
        "--method", "arcs", "--method", "dynres", "--method", "fixed", "--method", "default",
        "--plan", str(PLAN), "--out", str(RESULTS / "ladders"),
    ])
    sh([
        "compare", "--input", str(corpus), *alpha_flags,
        "--method", "arcs", "--method", "dynres", "--method", "fixed",
        "--plan", str(PLAN),
        "--format", "json", "--format", "csv", "--format", "markdown",
        "--out", str(RESULTS / "compare"),
    ])
    sh([
        "sweep", "--input", str(corpus), *alpha_flags,
        "--format", "json", "--format", "csv", "--format", "markdown",
        "--out", str(RESULTS / "sweep"),
    ])
    sh([
        "pmf", "--input", str(corpus), *alpha_flags,
        "--format", "json", "--format", "csv", "--out", str(RESULTS / "pmf"),
    ])
    print(f"\nall results under {RESULTS}")


if __name__ == "__main__":
    run()
