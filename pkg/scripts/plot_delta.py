"""Plot delta_lo against log n from a sweep's plot_data.csv (needs matplotlib).

    python scripts/plot_delta.py results/plot_data.csv --torus results/torus_control.csv -o delta.png
"""

import argparse
import csv

import numpy as np


def read(path, ycol):
    with open(path) as f:
        rows = [r for r in csv.DictReader(f) if not r["n"].startswith("#")]
    n = np.array([float(r["n"]) for r in rows])
    return np.log(n), np.array([float(r[ycol]) for r in rows])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("plot_data")
    ap.add_argument("--torus", help="torus_control.csv from the same sweep")
    ap.add_argument("-o", "--output", default="delta.png")
    args = ap.parse_args(argv)

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x, y = read(args.plot_data, "delta_lo")
    slope, icpt = np.polyfit(x, y, 1)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(x, y, "o", label="genus 2 slit")
    ax.plot(x, slope * x + icpt, "-", lw=1, label=f"fit slope {slope:.3f}")
    if args.torus:
        tx, ty = read(args.torus, "delta_lo")
        ax.plot(tx, ty, "s", label="torus control")
    ax.set_xlabel("log n")
    ax.set_ylabel("delta lower bound")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
