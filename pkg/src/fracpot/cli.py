"""Command-line front end: kernel tables and identity verification sweeps.

Exit codes: 0 all checks passed, 1 an identity failed, 2 usage or config error.
"""

import argparse
import csv
import logging
import math
import sys

import numpy as np

from . import sweeps
from .composition import _riesz_by_subordination
from .errors import FracpotError
from .kernels import (PotentialParams, bessel_kernel, bessel_kernel_oracle, kernel_asymptotic,
                      riesz_domination_bound, riesz_kernel)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

KERNEL_COLUMNS = ("r", "closed_form", "subordination_oracle", "small_r_asymptotic",
                  "large_r_asymptotic", "riesz_bound")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"fracpot: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _usage_error(msg):
    print(f"fracpot: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def kernel_table(n, alpha, lam, r_min, r_max, points, spacing="linear"):
    """Rows (r, closed_form, subordination_oracle, small_r, large_r, riesz_bound); None = n/a."""
    p = PotentialParams(n, alpha, lam)
    if lam == 0 and not 0 < alpha < 0.5 * n:
        raise sweeps.ConfigError("lambda = 0 (Riesz) requires 0 < alpha < n/2")
    if not (0 < r_min <= r_max and math.isfinite(r_max)):
        raise sweeps.ConfigError("need 0 < r-min <= r-max")
    if points < 1:
        raise sweeps.ConfigError("points must be >= 1")
    if spacing == "log":
        rs = np.geomspace(r_min, r_max, points)
    else:
        rs = np.linspace(r_min, r_max, points)
    has_bound = 0 < alpha < 0.5 * n
    rows = []
    for r in rs:
        r = float(r)
        if lam == 0:
            closed = riesz_kernel(p, r).value
            oracle = _riesz_by_subordination(n, alpha, r)
            small = large = None
        else:
            closed = bessel_kernel(p, r).value
            oracle = bessel_kernel_oracle(p, r).value
            small = kernel_asymptotic(p, r, "small_r").value
            large = kernel_asymptotic(p, r, "large_r").value
        bound = riesz_domination_bound(PotentialParams(n, alpha), r) if has_bound else None
        rows.append((r, closed, oracle, small, large, bound))
    return rows


def _cmd_eval_kernel(args):
    try:
        rows = kernel_table(args.n, args.alpha, args.lam, args.r_min, args.r_max, args.points,
                            args.spacing)
    except (FracpotError, sweeps.ConfigError, ValueError) as exc:
        return _usage_error(str(exc))
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(KERNEL_COLUMNS)
        for row in rows:
            w.writerow(["" if v is None else repr(v) for v in row])
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def _cmd_verify(args):
    try:
        values = {}
        if args.config:
            with open(args.config) as fh:
                values.update(sweeps.parse_config_text(fh.read()))
        for item in args.set or ():
            values.update(sweeps.parse_config_text(item))
        kw = {}
        for k in ("output", "format", "seed", "perturb"):
            v = getattr(args, k)
            if v is not None:
                kw[k] = v
        cfg = sweeps.build_config(args.identity, values, **kw)
        if args.tolerance is not None:
            cfg.values["tolerance"] = args.tolerance
        doc = sweeps.run(cfg)
    except (OSError, sweeps.ConfigError, FracpotError, ValueError) as exc:
        return _usage_error(str(exc))
    if doc["summary"]["total"] == 0:
        return _usage_error("no valid parameter tuples in the sweep")
    text = sweeps.serialize(doc, cfg.format)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    elif not args.quiet:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    s = doc["summary"]
    print(f"{s['passed']}/{s['total']} passed (worst rel_error {s['worst_rel_error']:.3e})",
          file=sys.stderr)
    return EXIT_OK if s["passed"] == s["total"] else EXIT_FAIL


def build_parser():
    p = _Parser(prog="fracpot", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log skipped tuples")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval-kernel", help="tabulate a kernel and its approximants as CSV")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--alpha", type=float, required=True)
    e.add_argument("--lambda", dest="lam", type=float, default=0.0)
    e.add_argument("--r-min", type=float, default=0.1)
    e.add_argument("--r-max", type=float, default=10.0)
    e.add_argument("--points", type=int, default=50)
    e.add_argument("--spacing", choices=("linear", "log"), default="linear")
    e.add_argument("--output", help="CSV path (default stdout)")
    e.set_defaults(func=_cmd_eval_kernel)

    v = sub.add_parser("verify", help="run an identity sweep and write a report")
    v.add_argument("identity", choices=sweeps.IDENTITIES)
    v.add_argument("--config", help="key = value file with sweep ranges")
    v.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    v.add_argument("--tolerance", type=float)
    v.add_argument("--perturb-constant", dest="perturb", type=float,
                   help="multiply the closed-form side by this factor (sensitivity control)")
    v.add_argument("--seed", type=int)
    v.add_argument("--format", choices=("json", "csv"))
    v.add_argument("--output")
    v.add_argument("-q", "--quiet", action="store_true", help="do not echo the report")
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
