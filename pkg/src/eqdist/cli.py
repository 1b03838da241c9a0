"""Command-line front end: ``eqdist {sample,exact,signs,compare,bounds}``.

Exit codes: 0 success, 2 usage or domain error, 3 I/O failure, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .approx import poisson_approx
from .closed_form import SAMPLERS, distribution_closed
from .errors import DomainError, EqdistError, NumericOverflow, TooLarge
from .records import RunRecord, format_csv
from .sampling import GENERATOR_NAME, DistributionSpec, Family, estimate_distribution
from .signs import ORACLE_MAX_N, SignBias, descartes_bounds, sign_change_table

log = logging.getLogger("eqdist")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4
DEFAULT_CAP = 5
# share of failed points above which a run is reported as a numeric failure
FAILURE_THRESHOLD = 1e-3


class UsageError(Exception):
    pass


class NumericFailure(Exception):
    pass


def _family(name: str) -> Family:
    try:
        return Family.parse(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _common(p: argparse.ArgumentParser, seed: bool = True):
    p.add_argument("--out", default="-", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $EQDIST_THREADS, else all cores)")
    if seed:
        p.add_argument("--seed", type=int, default=None,
                       help="root seed; a fresh one is drawn and logged when omitted")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqdist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    dist_help = "gaussian | uniform-beta | uniform-payoffs"

    s = sub.add_parser("sample", help="Monte Carlo distribution of the equilibrium count")
    s.add_argument("--players", type=int, required=True)
    s.add_argument("--dist", type=_family, default=Family.C1_GAUSSIAN_BETA, help=dist_help)
    s.add_argument("--scale", type=float, default=1.0)
    s.add_argument("--samples", type=int, default=10**6)
    _common(s)

    e = sub.add_parser("exact", help="distribution from the root-configuration integrals")
    e.add_argument("--players", type=int, required=True)
    e.add_argument("--dist", type=_family, default=Family.C1_GAUSSIAN_BETA, help=dist_help)
    e.add_argument("--points", type=int, default=None,
                   help="integration points per configuration (default 1e6 for d<=3, else 1e7)")
    e.add_argument("--sampler", choices=SAMPLERS, default="mc")
    e.add_argument("--cap", type=int, default=DEFAULT_CAP)
    _common(e)

    g = sub.add_parser("signs", help="sign-change probabilities p_{k,n}")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--alpha", type=float, default=0.5)
    g.add_argument("--method", choices=("symmetric", "recursive", "explicit", "oracle", "all"),
                   default="all")
    _common(g, seed=False)

    c = sub.add_parser("compare", help="all methods side by side, long format")
    c.add_argument("--players-max", type=int, required=True)
    c.add_argument("--dist", type=_family, default=Family.C1_GAUSSIAN_BETA, help=dist_help)
    c.add_argument("--scale", type=float, default=1.0)
    c.add_argument("--samples", type=int, default=10**6)
    c.add_argument("--points", type=int, default=None)
    c.add_argument("--cap", type=int, default=DEFAULT_CAP)
    _common(c)

    b = sub.add_parser("bounds", help="Descartes bounds on p_m")
    b.add_argument("--players", type=int, required=True)
    b.add_argument("--alpha", type=float, default=0.5)
    _common(b, seed=False)
    return parser


# ---------------------------------------------------------------- commands

def _check_players(d: int, cap: int | None = None):
    if d < 2:
        raise UsageError(f"--players must be >= 2 (got {d})")
    if cap is not None and d > cap:
        raise UsageError(f"--players {d} exceeds the cap {cap}: the configuration integrals have "
                         f"dimension d-1 and their cost grows steeply with d; raise --cap to force it")


def _check_alpha(alpha: float) -> SignBias:
    try:
        return SignBias(alpha)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _dist_rows(dist, spec: DistributionSpec, seed: int) -> list[dict[str, Any]]:
    return [{"d": dist.d, "m": m, "family": spec.family.cli_name, "scale": spec.scale, "p": p,
             "stderr": se, "n_samples": dist.n_samples, "n_degenerate": dist.n_degenerate,
             "seed": seed} for m, (p, se) in enumerate(zip(dist.p, dist.stderr))]


def _check_sampling_failures(dist):
    failed = dist.extra.get("n_failed", 0)
    if dist.n_samples and failed / dist.n_samples > FAILURE_THRESHOLD:
        raise NumericFailure(f"root oracle failed on {failed} of {dist.n_samples} games")


def _check_integration_failures(dist):
    if dist.extra.get("discarded_fraction", 0.0) > FAILURE_THRESHOLD:
        raise NumericFailure(f"{dist.extra['discarded_fraction']:.2%} of integration points "
                             f"were non-finite")


def cmd_sample(args) -> RunRecord:
    _check_players(args.players)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    spec = DistributionSpec(args.dist, args.scale)
    dist = estimate_distribution(spec, args.players, args.samples, args.seed, args.threads)
    _check_sampling_failures(dist)
    return RunRecord("sample", {}, __version__, distributions={"sampling": dist},
                     rows=_dist_rows(dist, spec, args.seed))


def _exact_rows(dist) -> list[dict[str, Any]]:
    rows = [{"d": dist.d, "m": t["m"], "k": t["k"], "kind": "term", "value": t["value"],
             "stderr": t["stderr"], "n_points": t["n_points"], "n_discarded": t["n_discarded"],
             "insufficient": t["insufficient"]} for t in dist.extra["terms"]]
    rows += [{"d": dist.d, "m": m, "kind": "total", "value": p, "stderr": se}
             for m, (p, se) in enumerate(zip(dist.p, dist.stderr))]
    return rows


def cmd_exact(args) -> RunRecord:
    _check_players(args.players, args.cap)
    if args.points is not None and args.points < 1000:
        raise UsageError("--points must be >= 1000")
    spec = DistributionSpec(args.dist)
    dist = distribution_closed(args.players, spec, args.points, args.seed, args.sampler, args.threads)
    _check_integration_failures(dist)
    return RunRecord("exact", {}, __version__, distributions={"closed-form": dist},
                     rows=_exact_rows(dist))


def cmd_signs(args) -> RunRecord:
    bias = _check_alpha(args.alpha)
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    if args.method == "oracle" and args.n > ORACLE_MAX_N:
        raise UsageError(f"the enumeration oracle is limited to n <= {ORACLE_MAX_N}")
    if args.method == "symmetric" and not bias.symmetric:
        raise UsageError("--method symmetric requires --alpha 0.5")
    if args.method == "all":
        methods = ["recursive", "explicit"]
        if bias.symmetric:
            methods.insert(0, "symmetric")
        if args.n <= ORACLE_MAX_N:
            methods.append("oracle")
        else:
            log.warning("oracle column omitted: n > %d", ORACLE_MAX_N)
    else:
        methods = [args.method]
    tables = {m: sign_change_table(bias, args.n, m) for m in methods}
    rows, worst = [], 0.0
    for n in range(args.n + 1):
        for k in range(n + 1):
            row: dict[str, Any] = {"n": n, "k": k, "alpha": bias.alpha}
            vals = [tables[m][k, n] for m in methods]
            row.update(zip(methods, vals))
            row["max_discrepancy"] = max(vals) - min(vals)
            worst = max(worst, row["max_discrepancy"])
            rows.append(row)
    if len(methods) > 1:
        log.info("max discrepancy between %s: %.3g", ", ".join(methods), worst)
    return RunRecord("signs", {"max_discrepancy": worst, "methods": methods}, __version__, rows=rows)


def cmd_compare(args) -> RunRecord:
    _check_players(args.players_max)
    spec = DistributionSpec(args.dist, args.scale)
    rows, dists = [], {}
    for d in range(2, args.players_max + 1):
        samp = estimate_distribution(spec, d, args.samples, args.seed, args.threads)
        _check_sampling_failures(samp)
        dists[f"sampling/d={d}"] = samp
        closed = None
        if d <= args.cap:
            closed = distribution_closed(d, spec, args.points, args.seed, "mc", args.threads)
            _check_integration_failures(closed)
            dists[f"closed-form/d={d}"] = closed
        bounds = descartes_bounds(d, spec.sign_probability)
        approx = poisson_approx(d)
        for m in range(d):
            rows.append({"d": d, "m": m, "method": "sampling", "value": samp.p[m],
                         "stderr": samp.stderr[m]})
            if closed is not None:
                rows.append({"d": d, "m": m, "method": "closed-form", "value": closed.p[m],
                             "stderr": closed.stderr[m]})
                rows.append({"d": d, "m": m, "method": "gap", "value": abs(samp.p[m] - closed.p[m]),
                             "stderr": math.hypot(samp.stderr[m], closed.stderr[m])})
            rows.append({"d": d, "m": m, "method": "descartes-upper", "value": bounds.upper[m]})
            rows.append({"d": d, "m": m, "method": "descartes-lower", "value": bounds.lower(m)})
            rows.append({"d": d, "m": m, "method": "poisson", "value": approx.p_approx[m]})
    return RunRecord("compare", {}, __version__, distributions=dists, rows=rows)


def cmd_bounds(args) -> RunRecord:
    bias = _check_alpha(args.alpha)
    _check_players(args.players)
    b = descartes_bounds(args.players, bias)
    rows = [{"d": b.d, "m": m, "alpha": bias.alpha, "upper": u, "lower": b.lower(m)}
            for m, u in enumerate(b.upper)]
    params = {"lower_p0": b.lower_p0, "lower_p1": b.lower_p1,
              "upper_pd2": b.upper_pd2, "upper_pd1": b.upper_pd1}
    return RunRecord("bounds", params, __version__, rows=rows)


COMMANDS = {"sample": cmd_sample, "exact": cmd_exact, "signs": cmd_signs,
            "compare": cmd_compare, "bounds": cmd_bounds}


def _write(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def main(argv: Sequence[str] | None = None) -> int:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    log.propagate = False
    try:
        return _run(argv)
    finally:
        log.removeHandler(handler)


def _run(argv: Sequence[str] | None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "seed", 0) is None:
        args.seed = int(np.random.SeedSequence().entropy)
        log.info("no --seed given; using entropy seed %d", args.seed)
    if args.threads is not None and args.threads < 1:
        print("eqdist: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE

    start = time.perf_counter()
    try:
        record = COMMANDS[args.command](args)
    except (UsageError, DomainError, TooLarge, ValueError) as exc:
        print(f"eqdist {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericFailure, NumericOverflow, ArithmeticError, EqdistError) as exc:
        print(f"eqdist {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    record.duration_s = time.perf_counter() - start
    params = {k: (v.cli_name if isinstance(v, Family) else v)
              for k, v in vars(args).items() if k not in ("out", "format")}
    if args.command in ("sample", "compare"):
        params["generator"] = GENERATOR_NAME
    record.params = {**params, **record.params}

    text = record.to_json() if args.format == "json" else format_csv(args.command, record.rows)
    try:
        _write(text, args.out)
    except OSError as exc:
        print(f"eqdist {args.command}: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
