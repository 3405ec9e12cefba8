"""Plot the time series written by `xy-qcr evolve`."""

import argparse

import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", help="path to evolve.csv")
    ap.add_argument("-o", "--out", default="evolve.png")
    args = ap.parse_args()

    df = pd.read_csv(args.csv, comment="#")
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6, 7))
    axes[0].plot(df.t, df.delta_energy)
    axes[0].set_ylabel(r"$\Delta E$")
    axes[1].plot(df.t, df.delta_log_negativity)
    axes[1].set_ylabel(r"$\Delta \mathcal{L}$")
    axes[2].plot(df.t, df.delta_mutual_information)
    axes[2].set_ylabel(r"$\Delta I$")
    axes[2].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
