"""Spacing and pair-correlation statistics of the first zeta zeros."""
import argparse

import numpy as np

from rsl import spectra, zeros


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--emax", type=float, default=1420.0)
    ap.add_argument("--bin", type=float, default=spectra.PAIR_BIN_WIDTH)
    args = ap.parse_args()

    g = zeros.cached_zeros(args.emax).as_array()[: args.count]
    seq = spectra.unfold_zeros(g)
    sp = seq.spacings()
    print(f"{g.size} zeros up to {g[-1]:.3f}")
    print(f"spacing variance {np.var(sp):.4f}  KS(GUE) {spectra.spacing_ks(seq, 'GUE'):.4f}  "
          f"KS(Poisson) {spectra.spacing_ks(seq, 'Poisson'):.4f}")
    x = np.arange(args.bin / 2, 3.0, args.bin)
    r2 = spectra.pair_correlation(seq, x, args.bin)
    ref = spectra.gue_pair_correlation_window(x, args.bin)
    for xi, a, b in zip(x, r2, ref):
        print(f"  x={xi:4.2f}  R2={a:6.3f}  GUE={b:6.3f}  {'*' if abs(a - b) >= 0.15 else ''}")
    print(f"sup deviation {np.max(np.abs(r2 - ref)):.3f}")


if __name__ == "__main__":
    main()
