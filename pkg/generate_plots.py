#!/usr/bin/env python3
"""
Spectral Gap Lab – Plot Generator
=================================

Reads every scan table ``sgl_data/scan_*.csv`` written by
``cli.py scan --csv`` and draws the Poincaré-constant estimates against
graph size into ``sgl_data/plots/``.

Usage:
    python generate_plots.py            # plot every scan table
    python generate_plots.py a.csv      # plot the given tables only
"""

from __future__ import annotations

import glob
import os
import sys

import matplotlib
matplotlib.use("Agg")                       # headless backend
import matplotlib.pyplot as plt
import pandas as pd

from config import DATA_DIR

PLOT_DIR = os.path.join(DATA_DIR, "plots")

# ── styling ────────────────────────────────────────────────────────
plt.rcParams.update({
    "figure.facecolor": "white",
    "axes.facecolor":   "#f8f8f8",
    "axes.grid":        True,
    "grid.alpha":       0.35,
    "grid.linewidth":   0.6,
    "font.size":        11,
})

BRUTE_COLOR  = "#1f77b4"   # blue
SEARCH_COLOR = "#ff7f0e"   # orange
UPPER_COLOR  = "#d62728"   # red


def load_scan(path: str) -> pd.DataFrame | None:
    """Load a scan table, sorted by size and trial."""
    if not os.path.isfile(path):
        print(f"  ⚠  {os.path.basename(path)} not found – skipping")
        return None
    df = pd.read_csv(path)
    if df.empty:
        print(f"  ⚠  {os.path.basename(path)} is empty – skipping")
        return None
    df = df[pd.to_numeric(df["lower"], errors="coerce").notna()].copy()
    df.sort_values(["n", "trial"], inplace=True)
    df.reset_index(drop=True, inplace=True)
    return df


def plot_scan(df: pd.DataFrame, filename: str) -> str:
    """
    Lower estimates per trial (brute vs. search) with the certified upper
    bounds where present and the per-size maximum as a line.
    """
    fig, ax = plt.subplots(figsize=(9, 5))
    for mode, color, marker in (("brute", BRUTE_COLOR, "o"), ("search", SEARCH_COLOR, "s")):
        part = df[df["mode"] == mode]
        if not part.empty:
            ax.scatter(part["n"], part["lower"], color=color, marker=marker, s=28,
                       label=f"lower ({mode})", zorder=3)
    upper = df.dropna(subset=["upper"])
    if not upper.empty:
        ax.scatter(upper["n"], upper["upper"], color=UPPER_COLOR, marker="v", s=28,
                   label="certified upper", zorder=3)
    best = df.groupby("n")["lower"].max()
    ax.plot(best.index, best.values, color="#555555", linewidth=1.2, label="max lower per size")

    d, delta, p = df["d"].iloc[0], df["delta"].iloc[0], df["p"].iloc[0]
    ax.set_title(f"γ(G, dist_H^{p:g})  G ∈ G(n,{d}), H ∈ G(n,{delta})")
    ax.set_xlabel("n = m")
    ax.set_ylabel("Poincaré constant")
    ax.set_xticks(sorted(df["n"].unique()))
    ax.legend(loc="upper left", fontsize=9)
    fig.tight_layout()

    out = os.path.join(PLOT_DIR, filename)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def main(argv: list[str] | None = None) -> int:
    paths = argv if argv else sorted(glob.glob(os.path.join(DATA_DIR, "scan_*.csv")))
    if not paths:
        print("  ⚠  no scan tables found – run `cli.py scan --csv` first")
        return 0
    os.makedirs(PLOT_DIR, exist_ok=True)
    written = 0
    for path in paths:
        df = load_scan(path)
        if df is None:
            continue
        name = os.path.splitext(os.path.basename(path))[0] + ".png"
        print(f"  ✓ {plot_scan(df, name)}")
        written += 1
    print(f"  {written} plot(s) in {PLOT_DIR}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
