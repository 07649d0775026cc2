#include "dilsim/scenario.hpp"

namespace dilsim {

// Written next to the matrix outputs; consumes aggregate.csv only.
std::string plot_script() {
  return R"PY(#!/usr/bin/env python3
"""Renders grouped-bar figures (mean with min/max whiskers) from aggregate.csv.

Usage: python3 plot.py [aggregate.csv] [outdir]
Produces one PNG per (topology, metric): bars grouped by consumer2StartS,
one series per (stack, consumer).
"""
import csv
import os
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

METRICS = [
    ("meanDelayS", "Mean retrieval delay (s)"),
    ("meanHopCount", "Mean hop count"),
    ("totalRetries", "Retransmissions"),
    ("goodputBps", "Goodput (bit/s)"),
    ("lossRate", "Loss rate"),
    ("completionFraction", "Completion fraction"),
]


def main():
    agg = sys.argv[1] if len(sys.argv) > 1 else "aggregate.csv"
    outdir = sys.argv[2] if len(sys.argv) > 2 else os.path.dirname(agg) or "."
    rows = list(csv.DictReader(open(agg)))
    topologies = sorted({r["topology"] for r in rows})
    for topo in topologies:
        for metric, label in METRICS:
            sel = [r for r in rows if r["topology"] == topo and r["metric"] == metric]
            if not sel:
                continue
            starts = sorted({float(r["consumer2StartS"]) for r in sel})
            series = defaultdict(dict)  # (stack, policy, consumer) -> start -> row
            for r in sel:
                key = (r["stack"], r["cachePolicy"], r["consumer"])
                series[key][float(r["consumer2StartS"])] = r
            fig, ax = plt.subplots(figsize=(7, 4))
            width = 0.8 / max(len(series), 1)
            for i, (key, byStart) in enumerate(sorted(series.items())):
                xs, means, lo, hi = [], [], [], []
                for s_i, start in enumerate(starts):
                    if start not in byStart:
                        continue
                    r = byStart[start]
                    xs.append(s_i + i * width)
                    means.append(float(r["mean"]))
                    lo.append(float(r["mean"]) - float(r["min"]))
                    hi.append(float(r["max"]) - float(r["mean"]))
                name = f"{key[0]}/{key[1]} c{key[2]}"
                ax.bar(xs, means, width=width, label=name,
                       yerr=[lo, hi], capsize=3)
            ax.set_xticks([i + 0.4 - width / 2 for i in range(len(starts))])
            ax.set_xticklabels([f"{s:g}" for s in starts])
            ax.set_xlabel("consumer 2 start time (s)")
            ax.set_ylabel(label)
            ax.set_title(f"{topo}: {label}")
            ax.legend(fontsize=7)
            fig.tight_layout()
            path = os.path.join(outdir, f"fig_{topo}_{metric}.png")
            fig.savefig(path, dpi=150)
            plt.close(fig)
            print("wrote", path)


if __name__ == "__main__":
    main()
)PY";
}

}  // namespace dilsim
