"""Scan constant Maslov phases for one that reproduces the prime-sum signs.

For a single orbit of period log 2, the generic trace-formula terms
sin(r(S - mu)) are compared with -sin(r S) at many heights.  A phase that
works for r = 1 alone or r = 2 alone exists; none works for both.
"""
import argparse

import numpy as np

from rsl import orbits


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--heights", type=int, default=200)
    ap.add_argument("--mu-points", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    E = np.random.default_rng(args.seed).uniform(1, 50, args.heights)
    for reps in ((1,), (2,), (1, 2)):
        ok = orbits.mu_scan(E, n_mu=args.mu_points, reps=reps)
        mus = 2 * np.pi * np.flatnonzero(ok) / args.mu_points
        shown = ", ".join(f"{m:.4f}" for m in mus[:6]) + (" ..." if mus.size > 6 else "")
        print(f"r in {reps}: {ok.sum():4d} admissible mu  {shown}")


if __name__ == "__main__":
    main()
