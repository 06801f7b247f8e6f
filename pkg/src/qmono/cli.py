"""Command-line entry point: ``qmono <subcommand> ...``.

Exit status: 0 success, 1 bad arguments, 2 runtime failure (including more
optimizer failures than ``--max-failed`` allows).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from math import pi

from .experiments import (
    MEASURES, SweepConfig, atomic_write, estimate_fraction, histogram_powers, render_json,
    score_state, sweep_genw_grid, validate_suite,
)
from .measures import OptimizerFailure
from .monogamy import (
    DEFAULT_CAP, CapExceeded, NoFinitePower, ScoreTriple, min_monogamy_power, monogamy_record,
)
from .optimizer import OptimizerConfig
from .states import (
    FAMILIES, GenWParams, SeededSampler, generalized_w, ghz, ghz_class, haar_random_pure,
    w_class, w_state,
)

THREADS_ENV = "QMONO_THREADS"

STATE_FORMS = "genw:theta,phi | ghz | w | wclass:a,b,c,d | ghzclass:l0,l1,l2,l3,l4,phase | haar:<counter>"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text, n=None, kind=float):
    try:
        vals = [kind(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse numbers from {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} comma-separated values, got {len(vals)}")
    return vals


def parse_state(spec: str, seed: int = 0):
    name, _, args = spec.partition(":")
    try:
        if name == "ghz" and not args:
            return ghz()
        if name == "w" and not args:
            return w_state()
        if name == "genw":
            return generalized_w(GenWParams(*_floats(args, 2)))
        if name == "wclass":
            return w_class(*_floats(args, 4, complex))
        if name == "ghzclass":
            v = _floats(args, 6)
            return ghz_class(*v[:5], phase=v[5])
        if name == "haar":
            return haar_random_pure(SeededSampler(seed, int(args)), 3)
    except (ValueError, TypeError) as e:
        raise UsageError(f"bad state spec {spec!r}: {e}") from None
    raise UsageError(f"bad state spec {spec!r}; accepted forms: {STATE_FORMS}")


def parse_grid(text):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"grid must look like NxM, got {text!r}") from None


def parse_powers(text):
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 1:
        raise UsageError(f"powers must be positive integers, got {text!r}")
    return tuple(out)


def _optimizer(args):
    kw = {}
    if args.opt_grid:
        kw["grid_t"], kw["grid_p"] = parse_grid(args.opt_grid)
    if args.opt_tol is not None:
        kw["refine_tol"] = args.opt_tol
    try:
        return OptimizerConfig(**kw)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return 1


def _num(v):
    return "nan" if v != v else f"{v:.6f}"


def cmd_score(args):
    psi = parse_state(args.state, args.seed)
    triple, ok = score_state(psi, args.measure, _optimizer(args))
    rec = monogamy_record(triple, power=args.power)
    if args.format == "json":
        d = {"state": args.state, "measure": args.measure, "converged": ok}
        d.update(rec.as_dict())
        sys.stdout.write(render_json(d))
    else:
        lines = [
            ("state", args.state), ("measure", args.measure), ("power", str(rec.power)),
            ("Q_A:BC", _num(triple.x)), ("Q_AB", _num(triple.y)), ("Q_AC", _num(triple.z)),
            ("delta", _num(rec.delta)),
            ("min_power", "NO_FINITE_POWER" if rec.min_power is None else str(rec.min_power)),
            ("status", rec.status),
        ]
        for k, v in lines:
            print(f"{k:<10} {v}")
    return 0 if ok else 2


def _min_power_text(t, cap):
    try:
        return str(min_monogamy_power(t, cap))
    except NoFinitePower:
        return "NO_FINITE_POWER"
    except CapExceeded:
        return "CAP_EXCEEDED"


def _triple(text):
    try:
        return ScoreTriple(*_floats(text, 3))
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_min_power(args):
    if (args.triple is None) == (args.batch is None):
        raise UsageError("give exactly one of --triple or --batch")
    if args.triple is not None:
        print(_min_power_text(_triple(args.triple), args.cap))
        return 0
    try:
        fh = sys.stdin if args.batch == "-" else open(args.batch)
    except OSError as e:
        raise UsageError(f"cannot read batch file: {e}") from None
    with fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("x,"):
                continue
            print(f"{line},{_min_power_text(_triple(line), args.cap)}")
    return 0


def _sweep_config(args, family, **kw):
    try:
        return SweepConfig(
            family=family, measure=args.measure, powers=parse_powers(args.powers),
            seed=args.seed, optimizer=_optimizer(args), out_path=args.out,
            format=args.format, threads=_threads(args), mono_tol=args.mono_tol, **kw)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _report(res, args):
    total = len(res.records)
    failed = res.manifest.get("n_failed", 0)
    logging.getLogger("qmono").info("wall time %.2f s", res.wall_time)
    if args.out is None:
        for f in res.fractions:
            print(f"power {f['power']:>3}  frac_nonmono {_num(f['frac_nonmono'])}  "
                  f"stderr {_num(f['stderr'])}  n_valid {f['n_valid']}  n_failed {f['n_failed']}")
    if total and failed / total > args.max_failed:
        print(f"optimizer failures {failed}/{total} exceed --max-failed {args.max_failed}",
              file=sys.stderr)
        return 2
    return 0


def cmd_sweep_genw(args):
    cfg = _sweep_config(args, "genw", grid=parse_grid(args.grid),
                        gnuplot_path=args.gnuplot, gnuplot_power=args.gnuplot_power)
    return _report(sweep_genw_grid(cfg), args)


def cmd_fraction(args):
    return _report(estimate_fraction(_sweep_config(args, args.family, samples=args.samples)), args)


def cmd_haar_hist(args):
    return _report(histogram_powers(_sweep_config(args, "haar3", samples=args.samples)), args)


def cmd_validate(args):
    rep = validate_suite(args.seed, args.samples, _optimizer(args), _threads(args))
    text = render_json(rep)
    if args.out:
        atomic_write(args.out, text)
    if args.format == "json" or not args.out:
        sys.stdout.write(text)
    bad = (rep["ckw"]["n_violations"] or rep["theorem3"]["violations"]
           or rep["kw_residual"]["n_above_1e-3"] or rep["eq6_identity"]["max_abs"] > 1e-9)
    return 2 if bad else 0


def _common(p, sweep=True):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--opt-grid", metavar="TxP", help="optimizer basis grid (default 24x48)")
    p.add_argument("--opt-tol", type=float, help="optimizer refinement tolerance (default 1e-6)")
    p.add_argument("--threads", type=int, help=f"worker processes (env {THREADS_ENV})")
    if sweep:
        p.add_argument("--measure", choices=MEASURES, default="deficit_fwd")
        p.add_argument("--powers", default="1,2,3,4,5", help="e.g. 1,2,5 or 1-6")
        p.add_argument("--out", help="output file (stdout summary if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--mono-tol", type=float, default=1e-9,
                       help="delta < -tol counts as non-monogamous")
        p.add_argument("--max-failed", type=float, default=0.01,
                       help="allowed fraction of optimizer failures before exit 2")


def build_parser():
    ap = _Parser(prog="qmono", description="Monogamy scores of three-qubit states.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("score", help="monogamy record of one state")
    p.add_argument("--state", required=True, help=STATE_FORMS)
    p.add_argument("--measure", choices=MEASURES, required=True)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    _common(p, sweep=False)
    p.set_defaults(fn=cmd_score)

    p = sub.add_parser("min-power", help="minimal monogamy-restoring power of score triples")
    p.add_argument("--triple", help="x,y,z")
    p.add_argument("--batch", help="CSV file of x,y,z lines ('-' for stdin)")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(fn=cmd_min_power)

    p = sub.add_parser("sweep-genw", help="generalized W grid surface")
    p.add_argument("--grid", default="100x100", metavar="NxM")
    p.add_argument("--gnuplot", help="also write a whitespace matrix for gnuplot")
    p.add_argument("--gnuplot-power", type=int)
    _common(p)
    p.set_defaults(fn=cmd_sweep_genw)

    p = sub.add_parser("fraction", help="Monte Carlo non-monogamous fractions")
    p.add_argument("--family", choices=tuple(FAMILIES), default="genw")
    p.add_argument("--samples", type=int, default=10_000)
    _common(p)
    p.set_defaults(fn=cmd_fraction)

    p = sub.add_parser("haar-hist", help="Haar three-qubit fractions across powers")
    p.add_argument("--samples", type=int, default=10_000)
    _common(p)
    p.set_defaults(fn=cmd_haar_hist, powers="1-6")

    p = sub.add_parser("validate", help="oracle and identity checks")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "json"), default="text")
    _common(p, sweep=False)
    p.set_defaults(fn=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.fn(args)
    except UsageError as e:
        ap.print_usage(sys.stderr)
        print(f"qmono: error: {e}", file=sys.stderr)
        return 1
    except (OptimizerFailure, OSError, FloatingPointError) as e:
        print(f"qmono: runtime failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
