"""Scaled response against temperature, one panel per quantity.

Reads the sweep_temperature_*.csv files in a directory, or a quench_length_*.csv file.
"""

import argparse
import glob
import os

import matplotlib.pyplot as plt
import pandas as pd


def sweep(directory, out):
    paths = sorted(glob.glob(os.path.join(directory, "sweep_temperature_*.csv")))
    if not paths:
        raise SystemExit(f"no sweep_temperature_*.csv in {directory}")
    fig, axes = plt.subplots(1, len(paths), figsize=(4 * len(paths), 3.5), squeeze=False)
    for ax, path in zip(axes[0], paths):
        df = pd.read_csv(path, comment="#")
        for h0, g in df.groupby("h0"):
            ax.plot(g.temperature, g.scaled, marker=".", label=f"h0 = {h0:g}")
        ax.set_title(os.path.basename(path)[len("sweep_temperature_"):-4])
        ax.set_xlabel("T")
    axes[0][0].set_ylabel("scaled response")
    axes[0][0].legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def quench_length(path, out):
    df = pd.read_csv(path, comment="#")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for col in (c for c in df.columns if c.startswith("scaled_")):
        ax.plot(df.temperature, df[col], marker=".", label=col[len("scaled_"):].replace("_", " "))
    ax.set_xlabel("T")
    ax.set_ylabel("scaled response")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("path", help="output directory of sweep-temperature, or a quench_length CSV")
    ap.add_argument("-o", "--out", default="sweep.png")
    args = ap.parse_args()
    if os.path.isdir(args.path):
        sweep(args.path, args.out)
    else:
        quench_length(args.path, args.out)


if __name__ == "__main__":
    main()
