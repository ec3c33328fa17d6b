#!/usr/bin/env python3
"""
Spectral Gap Lab — Pipeline Runner
==================================

Wrapper script that runs the desk-scale pipeline in order:
  1) constants     — log-space constants table for d = 3
  2) gen source    — sample a 3-regular graph on 8 vertices
  3) cheeger       — exact Cheeger constant and spectral sandwich
  4) approx build  — quotient approximator U_4 from the source graph
  5) gen host      — sample a 3-regular host on 6 vertices
  6) approx spread — exhaustive spread of U_4 over the host metric
  7) scan          — gamma(G, dist_H) for n = m in 6, 8, 10
  8) plots         — charts from the scan tables

After each step the JSON it wrote is read back and its headline number
(h(G), the spread, the scan maximum, ...) goes into the summary table.
All outputs land in ``sgl_data/``.

Usage:
    ./run_all.py              # run full pipeline
    ./run_all.py --skip 7     # skip the scan
    ./run_all.py --only 1 3   # run only steps 1 and 3
    ./run_all.py --dry-run    # check dependencies only, don't run anything
"""

from __future__ import annotations

import argparse
import importlib.metadata
import importlib.util
import json
import os
import subprocess
import sys
import time
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Callable

from config import DATA_DIR, SCRIPT_DIR


# ---------------------------------------------------------------------------
#  Packages: (module, required, who needs it)
# ---------------------------------------------------------------------------
PACKAGES = [
    ("numpy",      True,  "every library module"),
    ("pandas",     True,  "cli.py scan --csv"),
    ("matplotlib", True,  "generate_plots.py"),
    ("scipy",      False, "tests (LP and chi-square oracles)"),
    ("networkx",   False, "tests (graph oracles)"),
]


def _read(path: str) -> dict[str, Any] | None:
    try:
        with open(os.path.join(SCRIPT_DIR, path), encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError):
        return None


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


# ---------------------------------------------------------------------------
#  Pipeline steps
# ---------------------------------------------------------------------------
#  "headline" maps the step's JSON output to one short summary string.
STEPS: list[dict[str, Any]] = [
    {
        "num": 1,
        "name": "Constants Table",
        "args": ["constants", "--d", "3", "--eps", "1e-4", "--m", "1000", "--delta", "3",
                 "--out", "sgl_data/constants_3.json"],
        "output": "sgl_data/constants_3.json",
        "headline": lambda d: f"l* = {d['constants']['ell_star']}",
        "description": "Evaluate Gamma, Gamma1, Gamma2, alpha, eta, l* in log space",
    },
    {
        "num": 2,
        "name": "Sample Source Graph",
        "args": ["gen", "-n", "8", "-d", "3", "--seed", "1", "--out", "sgl_data/g8.json"],
        "output": "sgl_data/g8.json",
        "headline": lambda d: f"n = {d['n']}",
        "description": "Uniform 3-regular graph on 8 vertices",
    },
    {
        "num": 3,
        "name": "Cheeger Sandwich",
        "args": ["cheeger", "--graph", "sgl_data/g8.json", "--out", "sgl_data/cheeger_g8.json"],
        "output": "sgl_data/cheeger_g8.json",
        "headline": lambda d: f"h = {_fmt(d['cut']['h'])}",
        "description": "Exact h(G) against (d - lambda2)/2 and sqrt(2d(d - lambda2))",
    },
    {
        "num": 4,
        "name": "Build Approximator",
        "args": ["approx", "build", "--graph", "sgl_data/g8.json",
                 "--multigraph-out", "sgl_data/u4.json", "--out", "sgl_data/approx_build.json"],
        "output": "sgl_data/approx_build.json",
        "headline": lambda d: f"|E_U| = {d['edges']}",
        "description": "Quotient multigraph U_4 with 12 edges",
    },
    {
        "num": 5,
        "name": "Sample Host Graph",
        "args": ["gen", "-n", "6", "-d", "3", "--seed", "2", "--out", "sgl_data/h6.json"],
        "output": "sgl_data/h6.json",
        "headline": lambda d: f"n = {d['n']}",
        "description": "Uniform 3-regular host on 6 vertices",
    },
    {
        "num": 6,
        "name": "Approximator Spread",
        "args": ["approx", "spread", "--multigraph", "sgl_data/u4.json",
                 "--host", "sgl_data/h6.json", "--seed", "3",
                 "--out", "sgl_data/approx_spread.json"],
        "output": "sgl_data/approx_spread.json",
        "headline": lambda d: f"spread = {_fmt(d['report']['spread'])}",
        "description": "max(A/B) / min(A/B) over every 4-tuple of host points",
    },
    {
        "num": 7,
        "name": "Poincaré Scan",
        "args": ["scan", "--d", "3", "--delta", "3", "--sizes", "6,8,10", "--trials", "3",
                 "--seed", "1", "--csv", "sgl_data/scan_3_3.csv",
                 "--out", "sgl_data/scan_3_3.json"],
        "output": "sgl_data/scan_3_3.json",
        "headline": lambda d: "sandwich " + ("ok" if d["summary"]["sandwich_ok"] else "BROKEN"),
        "description": "Brute / local-search gamma with certified upper bounds",
    },
    {
        "num": 8,
        "name": "Generate Plots",
        "script": "generate_plots.py",
        "description": "Lower estimate vs. size from scan tables into sgl_data/plots/",
    },
]


@dataclass
class StepResult:
    num: int
    name: str
    code: int
    elapsed: float
    headline: str = ""

    @property
    def status(self) -> str:
        # exit code 2 is a failed verdict, distinct from an error
        if self.code == 0:
            return "OK"
        return "VERDICT FAIL" if self.code == 2 else "FAILED"


# ---------------------------------------------------------------------------
#  Dependency checker
# ---------------------------------------------------------------------------
def check_dependencies() -> bool:
    """Report every package with its installed version.  False if a required one is missing."""
    print("Checking Python dependencies...")
    missing = []
    for module, required, used_by in PACKAGES:
        if importlib.util.find_spec(module) is None:
            tag = "✗" if required else "~"
            print(f"  {tag} {module:<11} missing, used by {used_by}")
            if required:
                missing.append(module)
            continue
        try:
            version = importlib.metadata.version(module)
        except importlib.metadata.PackageNotFoundError:
            version = "?"
        print(f"  ✓ {module:<11} {version}{'' if required else '  (optional)'}")

    if missing:
        print()
        print(f"ERROR: install the missing packages first: pip install {' '.join(missing)}")
        return False
    return True


# ---------------------------------------------------------------------------
#  Step runner
# ---------------------------------------------------------------------------
def run_step(step: dict[str, Any], timeout: float = 900.0) -> StepResult:
    script_path = os.path.join(SCRIPT_DIR, step.get("script", "cli.py"))
    cmd = [sys.executable, script_path] + step.get("args", [])

    start = time.time()
    try:
        code = subprocess.run(cmd, cwd=SCRIPT_DIR, timeout=timeout).returncode
    except subprocess.TimeoutExpired:
        print(f"  ERROR: step {step['num']} exceeded {timeout:.0f}s")
        code = 1
    result = StepResult(step["num"], step["name"], code, time.time() - start)

    headline: Callable[[dict[str, Any]], str] | None = step.get("headline")
    if headline is not None and code in (0, 2):
        doc = _read(step["output"])
        try:
            result.headline = headline(doc) if doc is not None else "(no output)"
        except (KeyError, TypeError):
            result.headline = "(unexpected output)"
    return result


def select_steps(skip: list[int] | None, only: list[int] | None) -> list[dict[str, Any]]:
    if only:
        return [s for s in STEPS if s["num"] in set(only)]
    skip_set = set(skip or ())
    return [s for s in STEPS if s["num"] not in skip_set]


def print_summary(results: list[StepResult], total: float) -> bool:
    print("═" * 74)
    print(f"  {'Step':<5} {'Name':<24} {'Status':<13} {'Time':>7}  Result")
    print("═" * 74)
    for r in results:
        print(f"  {r.num:<5} {r.name:<24} {r.status:<13} {r.elapsed:>6.1f}s  {r.headline}")
    print(f"  {'':<43} {total:>6.1f}s")
    bad = [r.name for r in results if r.code != 0]
    if bad:
        print(f"\n  {len(bad)} step(s) did not finish cleanly: {', '.join(bad)}")
    return not bad


# ---------------------------------------------------------------------------
#  Main
# ---------------------------------------------------------------------------
def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Spectral Gap Lab — run the desk-scale pipeline")
    parser.add_argument("--skip", type=int, nargs="+", metavar="N",
                        help=f"Step number(s) to skip (1-{len(STEPS)})")
    parser.add_argument("--only", type=int, nargs="+", metavar="N",
                        help=f"Run only these step number(s) (1-{len(STEPS)})")
    parser.add_argument("--dry-run", action="store_true",
                        help="Check dependencies only, don't run any scripts")
    parser.add_argument("--timeout", type=float, default=900.0, help="Per-step timeout in seconds")
    args = parser.parse_args(argv)

    print(f"\nSpectral Gap Lab — Pipeline  ({datetime.now():%Y-%m-%d %H:%M:%S})\n")
    if not check_dependencies():
        return 1
    if args.dry_run:
        return 0

    steps = select_steps(args.skip, args.only)
    if not steps:
        print("Nothing selected.")
        return 0
    os.makedirs(DATA_DIR, exist_ok=True)

    results = []
    began = time.time()
    for step in steps:
        print(f"\n── [{step['num']}/{len(STEPS)}] {step['name']}: {step['description']}")
        result = run_step(step, args.timeout)
        print(f"   {result.status} in {result.elapsed:.1f}s {result.headline}")
        results.append(result)
    print()
    return 0 if print_summary(results, time.time() - began) else 1


if __name__ == "__main__":
    raise SystemExit(main())
