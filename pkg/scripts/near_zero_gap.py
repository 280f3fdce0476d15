"""Near-zero level density for class C versus class D ensembles."""
import argparse

from rsl import rmt, spectra


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    for label, seed in (("C", 11), ("D", 12)):
        spec = rmt.EnsembleSpec(label, args.n, seed=seed)
        samples = rmt.sample_spectra(spec, args.samples, threads=args.threads)
        near, bulk = spectra.near_zero_density(samples)
        print(f"class {label}: near-zero density {near:.4f}, bulk {bulk:.4f}, ratio {near / bulk:.3f}")


if __name__ == "__main__":
    main()
