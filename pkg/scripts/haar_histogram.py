"""Fraction of non-monogamous Haar three-qubit states for powers 1..6 of the deficit."""
import argparse

from qmono.experiments import SweepConfig, histogram_powers


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--max-power", type=int, default=6)
    ap.add_argument("--measure", default="deficit_fwd")
    ap.add_argument("--out", default=None)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    res = histogram_powers(SweepConfig(family="haar3", measure=args.measure,
                                       powers=tuple(range(1, args.max_power + 1)),
                                       samples=args.samples, seed=args.seed, out_path=args.out,
                                       threads=args.threads))
    for f in res.fractions:
        bar = "#" * round(60 * f["frac_nonmono"])
        print(f"{f['power']:>2} {100 * f['frac_nonmono']:6.2f}% {bar}")
    print(f"premise violations (excluded): {res.manifest['n_premise_violations']}")


if __name__ == "__main__":
    main()
