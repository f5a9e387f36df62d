#!/usr/bin/env python3
"""Plot deployed-application curves from a sweep's aggregate.csv.

Usage: plot_sweep.py <aggregate.csv> [out.png]

One line per (algorithm, q, beta) combination, deployed mean vs U, with
error bars from the per-point standard deviation.
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 1
    csv_path = sys.argv[1]
    out_path = sys.argv[2] if len(sys.argv) > 2 else "deployed_vs_u.png"

    df = pd.read_csv(csv_path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for (algorithm, q, beta), group in df.groupby(["algorithm", "q", "beta"]):
        group = group.sort_values("U")
        ax.errorbar(
            group["U"],
            group["deployed_mean"],
            yerr=group["deployed_std"],
            marker="o",
            capsize=3,
            label=f"{algorithm} q={q} beta={beta}",
        )
    ax.set_xlabel("batch size U")
    ax.set_ylabel("deployed applications")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
