"""Compare the smoothed prime-sum reconstruction of N(E) with the true staircase.

    python scripts/staircase.py --out staircase.csv
"""
import argparse

import numpy as np

from rsl import orbits, zeros
from rsl.cli import csv_text


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--emin", type=float, default=10.0)
    ap.add_argument("--emax", type=float, default=100.0)
    ap.add_argument("--points", type=int, default=4001)
    ap.add_argument("--primes", type=int, default=10**4)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--width", type=float, default=0.2, help="Gaussian smoothing width in E")
    ap.add_argument("--out", default="staircase.csv")
    args = ap.parse_args()

    grid = np.linspace(args.emin, args.emax, args.points)
    zl = zeros.cached_zeros(args.emax)
    trunc = orbits.TruncationSpec(args.primes, rep_cutoff=args.reps)
    recon = orbits.reconstruct_staircase(grid, trunc, args.width)
    true = zeros.staircase(grid, zl)
    with open(args.out, "w", newline="\n") as fh:
        fh.write(csv_text(["E", "staircase", "reconstruction"], zip(grid, true, recon)))
    rms = np.sqrt(np.mean((recon - true) ** 2))
    print(f"{len(zl)} zeros below {args.emax:g}; RMS deviation {rms:.4f}; wrote {args.out}")


if __name__ == "__main__":
    main()
