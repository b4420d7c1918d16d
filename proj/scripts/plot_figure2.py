#!/usr/bin/env python3
"""Sample plot of the solution-family data emitted by `wkam figure2`.

This script is documentation: the toolkit itself only writes CSV/JSON, and any
plotter can consume them. Usage:

    wkam --config configs/example.cfg figure2
    python3 scripts/plot_figure2.py figure2.csv
"""
import csv
import sys

import matplotlib.pyplot as plt


def main(path: str) -> None:
    xs, u_minus, u_plus_max, w_plus = [], [], [], []
    with open(path) as fh:
        rows = (r for r in fh if not r.startswith("#"))
        for row in csv.DictReader(rows):
            xs.append(float(row["x"]))
            u_minus.append(float(row["u_minus"]))
            u_plus_max.append(float(row["u_plus_max"]))
            w_plus.append(float(row["w_plus"]))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, u_minus, label="backward solution $u_-$", lw=2)
    ax.plot(xs, u_plus_max, label="maximal forward solution", ls="--", lw=2)
    ax.plot(xs, w_plus, label="anchored forward solution $w_+$", lw=2)
    ax.set_xlabel("$x$")
    ax.set_ylabel("$u$")
    ax.legend()
    fig.tight_layout()
    out = path.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "figure2.csv")
