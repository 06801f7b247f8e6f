"""Run the oracle/identity checks and print a JSON report."""
import argparse
import sys

from qmono.experiments import render_json, validate_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    sys.stdout.write(render_json(validate_suite(args.seed, args.samples)))


if __name__ == "__main__":
    main()
