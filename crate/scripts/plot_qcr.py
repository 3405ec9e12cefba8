"""Boundary temperature T*(h0) from `xy-qcr map-qcr`, with the fitted cone."""

import argparse
import glob
import json
import os

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("directory", help="output directory of map-qcr")
    ap.add_argument("-o", "--out", default="qcr.png")
    args = ap.parse_args()

    with open(os.path.join(args.directory, "map_qcr_summary.json")) as f:
        summary = json.load(f)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for path in sorted(glob.glob(os.path.join(args.directory, "map_qcr_*.csv"))):
        name = os.path.basename(path)[len("map_qcr_"):-4]
        df = pd.read_csv(path, comment="#")
        found = df[df.flag.isin(["crossing", "non_monotone"])]
        (line,) = ax.plot(found.h0, found.t_star, "o", ms=3, label=name)
        sat = df[df.flag == "saturated"]
        ax.plot(sat.h0, sat.t_star, "^", ms=3, color=line.get_color(), alpha=0.5)
        fit = summary["quantities"][name]["slope_fit"]
        if fit:
            h = np.linspace(df.h0.min(), df.h0.max(), 200)
            ax.plot(h, fit["slope"] * np.abs(h - 1) + fit["intercept"], "-", lw=0.8, color=line.get_color())
    ax.set_xlabel("h0")
    ax.set_ylabel("T*")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
