#!/usr/bin/env python3
"""Plot the CSVs written by `photon_src fig2` (needs matplotlib)."""

import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def by_omega0(rows, key):
    out = defaultdict(lambda: ([], []))
    for r in rows:
        xs, ys = out[float(r["omega0"])]
        xs.append(float(r["omega2"]))
        ys.append(float(r[key]))
    return out


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
    meta = load(out / "fig2_meta.csv")[0]
    panels = [
        ("fig2a.csv", "p_re_analytic", "p_re_numeric", "p_re_three_level", "P_re"),
        ("fig2b.csv", "p_total_analytic", "p_total_numeric", "p_total_three_level", "P_total"),
        ("fig2c.csv", "t_em", "t_em_lindblad", "t_em_three_level", "t_em g"),
    ]
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    for ax, (name, line, dots, ref, label) in zip(axes, panels):
        rows = load(out / name)
        for omega0, (xs, ys) in sorted(by_omega0(rows, line).items()):
            ax.plot(xs, ys, label=f"Omega0={omega0:g}")
        for omega0, (xs, ys) in sorted(by_omega0(rows, dots).items()):
            ax.plot(xs, ys, "o", ms=3, color="k", alpha=0.5)
        ax.axhline(float(meta[ref]), ls="--", color="gray")
        ax.set_xlabel("Omega2 / g")
        ax.set_ylabel(label)
    axes[0].legend()
    fig.tight_layout()
    fig.savefig(out / "fig2.png", dpi=150)


if __name__ == "__main__":
    main()
