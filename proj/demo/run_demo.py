#!/usr/bin/env python3
"""Runs every config in demo/configs through the CLI and plots the results.

usage: run_demo.py [--cli build/tools/pointlike_cli] [--out demo/output]
"""
import argparse
import pathlib
import subprocess

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

HERE = pathlib.Path(__file__).resolve().parent


def run(cli, cfg, out):
    subprocess.run([str(cli), cfg.stem.split("_")[0], "--config", str(cfg), "--out", str(out)], check=True)
    return pd.read_csv(out, comment="#")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", type=pathlib.Path, default=HERE.parent / "build" / "tools" / "pointlike_cli")
    ap.add_argument("--out", type=pathlib.Path, default=HERE / "output")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    data = {}
    for cfg in sorted((HERE / "configs").glob("*.cfg")):
        data[cfg.stem] = run(args.cli, cfg, args.out / f"{cfg.stem}.csv")
        print(f"{cfg.stem}: {len(data[cfg.stem])} rows")

    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4))
    pot = data["potential_boson"]
    left.plot(pot.x, pot.V, lw=1)
    left.set(xlabel="x", ylabel="V(x)", title="regulated potential, a = 0.01")
    left.set_yscale("symlog", linthresh=1.0)
    for name, label in [("evolve_ring", "L = 1"), ("evolve_ring50", "L = 50"), ("evolve_line", "L = inf")]:
        right.plot(data[name].t, data[name].p, label=label)
    right.set(xlabel="t", ylabel="p(t)", title="capture probability")
    right.legend()
    fig.tight_layout()
    fig.savefig(args.out / "potential_and_capture.png", dpi=150)

    fig, ax = plt.subplots(figsize=(5.5, 4))
    chain = data["chain_cosine"]
    worst = chain.groupby("N").abs_error.max()
    ax.loglog(worst.index, worst.values, "o-", label="max level error")
    ax.loglog(worst.index, worst.values[0] * (worst.index[0] / worst.index) ** 2, "--", label="N^-2")
    ax.set(xlabel="N", ylabel="error", title="chain vs continuum")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out / "chain_convergence.png", dpi=150)


if __name__ == "__main__":
    main()
