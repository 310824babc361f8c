#!/usr/bin/env python3
"""Plot helper for mtuc CSV outputs.

Consumes the CSVs written by `mtuc experiment`, `mtuc field` and
`mtuc train`; never computes anything itself.

  plot_results.py experiment results/fig8_offload.csv out.png
  plot_results.py field field.csv quiver.png
  plot_results.py curve curve.csv learning.png
"""

import csv
import sys
from collections import defaultdict


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def plot_experiment(rows, out, plt):
    by_algo = defaultdict(list)
    for r in rows:
        by_algo[r["algo"]].append((int(r["sweep"]), int(r["seed"]), float(r["profit"])))
    sweeps = sorted({s for cells in by_algo.values() for s, _, _ in cells})
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if len(sweeps) > 1:  # sweep on the x axis, mean +/- std over seeds
        for algo, cells in sorted(by_algo.items()):
            xs, means, stds = [], [], []
            for s in sweeps:
                vals = [p for sw, _, p in cells if sw == s]
                if not vals:
                    continue
                xs.append(s)
                means.append(sum(vals) / len(vals))
                stds.append((sum((v - means[-1]) ** 2 for v in vals) / len(vals)) ** 0.5)
            ax.errorbar(xs, means, yerr=stds, marker="o", capsize=3, label=algo)
        ax.set_xlabel("sweep value")
    else:  # bar chart of per-algo means over seeds
        algos = sorted(by_algo)
        means = [sum(p for _, _, p in by_algo[a]) / len(by_algo[a]) for a in algos]
        ax.bar(range(len(algos)), means)
        ax.set_xticks(range(len(algos)))
        ax.set_xticklabels(algos, rotation=20, ha="right")
    ax.set_ylabel("profit")
    ax.grid(True, alpha=0.3)
    if len(sweeps) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_field(rows, out, plt):
    xs = [float(r["x"]) for r in rows]
    ys = [float(r["y"]) for r in rows]
    vx = [float(r["vx"]) for r in rows]
    vy = [float(r["vy"]) for r in rows]
    speed = [float(r["speed"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 6))
    q = ax.quiver(xs, ys, vx, vy, speed, cmap="viridis", scale_units="xy", angles="xy")
    fig.colorbar(q, ax=ax, label="speed, m/s")
    ax.set_xlabel("x, m")
    ax.set_ylabel("y, m")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_curve(rows, out, plt):
    updates = [int(r["update_index"]) for r in rows]
    profit = [float(r["mean_episode_profit"]) for r in rows]
    lr = [float(r["learning_rate"]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(updates, profit, lw=0.7, alpha=0.6)
    # smoothed view
    window = max(1, len(profit) // 100)
    smooth = [sum(profit[max(0, i - window):i + 1]) / len(profit[max(0, i - window):i + 1])
              for i in range(len(profit))]
    ax.plot(updates, smooth, lw=2.0, label="episode profit (smoothed)")
    ax.set_xlabel("update")
    ax.set_ylabel("episode profit")
    ax2 = ax.twinx()
    ax2.plot(updates, lr, color="tab:red", lw=1.0, label="learning rate")
    ax2.set_ylabel("learning rate")
    ax2.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def main():
    if len(sys.argv) != 4 or sys.argv[1] not in {"experiment", "field", "curve"}:
        print(__doc__)
        return 2
    kind, path, out = sys.argv[1:4]
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    rows = read_rows(path)
    {"experiment": plot_experiment, "field": plot_field, "curve": plot_curve}[kind](rows, out, plt)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
