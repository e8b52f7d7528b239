"""Command-line entry point: ``anvm <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 3 series non-convergence, 4 censored
simulation.  ``ANVM_THREADS`` caps the number of simulation workers.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import platform
import sys
import tempfile
import time
from decimal import Decimal, InvalidOperation
from fractions import Fraction

import mpmath
import numpy as np
import scipy

from . import __version__
from .errors import DomainError
from .errorprob import pe_curve, snr_to_sigma2, union_bound_e8
from .gtable import GTable, g
from .lattice_an import nearest_point
from .moments import closed_form, exact_moment, moment_coefficients, moment_decimal, ExactMoment
from .simulate import SimConfig, run

log = logging.getLogger("anvm")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGED = 3
EXIT_CENSORED = 4

FIGURE_SERIES_DIMS = (1, 2, 3, 4, 5, 8)
FIGURE_MC_DIMS = (1, 2, 3, 4)


class UsageError(Exception):
    pass


def parse_grid(spec: str) -> list[float]:
    """``A:B:STEP`` (inclusive) or a single value -> list of floats."""
    try:
        parts = [Decimal(p) for p in spec.split(":")]
    except InvalidOperation:
        raise UsageError(f"bad SNR grid {spec!r}; expected A:B:STEP") from None
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise UsageError(f"bad SNR grid {spec!r}; expected A:B:STEP")
    a, b, step = parts
    if step <= 0 or b < a:
        raise UsageError(f"bad SNR grid {spec!r}; need STEP > 0 and B >= A")
    count = int((b - a) / step) + 1
    return [float(a + i * step) for i in range(count)]


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _workers(requested: int) -> int:
    cap = os.environ.get("ANVM_THREADS")
    if cap:
        try:
            requested = min(requested, max(1, int(cap)))
        except ValueError:
            raise UsageError(f"ANVM_THREADS must be an integer, got {cap!r}") from None
    return max(1, requested)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _ratstr(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# -- subcommands ------------------------------------------------------------


def cmd_gvalue(args, out):
    out.write(_ratstr(g((args.n, args.c, args.d))) + "\n")
    return EXIT_OK


def cmd_moments(args, out):
    table = GTable()
    coeffs = moment_coefficients(args.n, args.max_m, table)
    rows = []
    for m, r in enumerate(coeffs):
        dec = moment_decimal(ExactMoment(args.n, m, r), args.digits)
        rows.append({"m": m, "coeff_num": r.numerator, "coeff_den": r.denominator, "decimal": dec})
    if args.format == "json":
        payload = [dict(row, coeff_num=str(row["coeff_num"]), coeff_den=str(row["coeff_den"])) for row in rows]
        out.write(json.dumps({"n": args.n, "moments": payload}, indent=2) + "\n")
    else:
        out.write(_csv_text(["m", "coeff_num", "coeff_den", "decimal"], [list(r.values()) for r in rows]))
    return EXIT_OK


def cmd_closed_form(args, out):
    cf = closed_form(args.m)
    out.write(json.dumps(cf.to_json(), indent=2) + "\n")
    return EXIT_OK


def _pe_rows(points):
    return [[_fmt(p.snr_db), _fmt(p.sigma2), _fmt(p.pe), _fmt(p.pc), p.terms_used] for p in points]


PE_HEADER = ["snr_db", "sigma2", "pe", "pc", "terms_used"]


def cmd_pe(args, out):
    points = pe_curve(args.n, parse_grid(args.snr_db), Fraction(args.tol), max_terms=args.max_terms)
    out.write(_csv_text(PE_HEADER, _pe_rows(points)))
    failed = [p for p in points if not p.converged]
    for p in failed:
        log.error("snr %.6g dB: %s", p.snr_db, p.message)
    return EXIT_NONCONVERGED if failed else EXIT_OK


def _e8_rows(grid):
    rows = []
    for snr in grid:
        # E_8 is unimodular: V = 1, so sigma^2 = 1 / (4 SNR)
        sigma = math.sqrt(1.0 / (4.0 * 10.0 ** (snr / 10.0)))
        rows.append([_fmt(snr), _fmt(union_bound_e8(sigma))])
    return rows


def cmd_e8_bound(args, out):
    out.write(_csv_text(["snr_db", "pe_bound"], _e8_rows(parse_grid(args.snr_db))))
    return EXIT_OK


SIM_HEADER = ["snr_db", "sigma", "trials", "errors", "pe_hat", "ci_low", "ci_high", "censored"]


def _simulate_rows(n, grid, min_errors, max_trials, seed, workers):
    rows, censored = [], False
    for snr in grid:
        sigma = math.sqrt(snr_to_sigma2(snr, n).sigma2)
        res = run(SimConfig(n, sigma, min_errors, max_trials, seed, workers))
        censored |= res.censored
        rows.append(
            [_fmt(snr), _fmt(sigma), res.trials, res.errors, _fmt(res.pe_hat), _fmt(res.ci95_low), _fmt(res.ci95_high), int(res.censored)]
        )
    return rows, censored


def cmd_simulate(args, out):
    workers = _workers(args.workers)
    rows, censored = _simulate_rows(
        args.n, parse_grid(args.snr_db), args.min_errors, int(float(args.max_trials)), args.seed, workers
    )
    out.write(_csv_text(SIM_HEADER, rows))
    return EXIT_CENSORED if censored else EXIT_OK


def cmd_decode(args, out):
    try:
        y = [float(v) for v in args.point.split(",")]
    except ValueError:
        raise UsageError(f"--point must be comma-separated numbers, got {args.point!r}") from None
    if len(y) != args.n + 1:
        raise UsageError(f"A_{args.n} points have {args.n + 1} coordinates, got {len(y)}")
    x = nearest_point(np.array(y))
    out.write(",".join(str(int(v)) for v in x) + "\n")
    return EXIT_OK


def cmd_figure1(args, out):
    os.makedirs(args.output_dir, exist_ok=True)
    grid = parse_grid(args.snr_db)
    tol = Fraction(args.tol)
    workers = _workers(args.workers)
    max_trials = int(float(args.max_trials))
    manifest = {
        "seed": args.seed,
        "snr_db_grid": grid,
        "tol": args.tol,
        "max_terms": args.max_terms,
        "min_errors": args.min_errors,
        "max_trials": max_trials,
        "workers": workers,
        "versions": {
            "anvm": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "mpmath": mpmath.__version__,
        },
        "series_files": [],
        "mc_files": [],
        "failures": [],
    }

    table = GTable()
    for n in FIGURE_SERIES_DIMS:
        t0 = time.time()
        points = pe_curve(n, grid, tol, table, max_terms=args.max_terms)
        name = f"series_A{n}.csv"
        _write_atomic(os.path.join(args.output_dir, name), _csv_text(PE_HEADER, _pe_rows(points)))
        manifest["series_files"].append(name)
        for p in points:
            if not p.converged:
                manifest["failures"].append({"file": name, "snr_db": p.snr_db, "reason": p.message})
        log.info("A_%d series done in %.1fs", n, time.time() - t0)

    name = "bound_E8.csv"
    _write_atomic(os.path.join(args.output_dir, name), _csv_text(["snr_db", "pe_bound"], _e8_rows(grid)))
    manifest["series_files"].append(name)

    if not args.no_mc:
        for n in FIGURE_MC_DIMS:
            t0 = time.time()
            rows, _ = _simulate_rows(n, grid, args.min_errors, max_trials, args.seed, workers)
            name = f"mc_A{n}.csv"
            _write_atomic(os.path.join(args.output_dir, name), _csv_text(SIM_HEADER, rows))
            manifest["mc_files"].append(name)
            for row in rows:
                if row[-1]:
                    manifest["failures"].append(
                        {"file": name, "snr_db": float(row[0]), "reason": f"censored at {row[2]} trials"}
                    )
            log.info("A_%d simulation done in %.1fs", n, time.time() - t0)

    _write_atomic(os.path.join(args.output_dir, "manifest.json"), json.dumps(manifest, indent=2) + "\n")
    out.write(f"wrote {len(manifest['series_files']) + len(manifest['mc_files'])} curve files to {args.output_dir}\n")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anvm", description="Voronoi-cell moments of A_n and lattice-code error probability")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gvalue", help="exact G(n, c, d) as p/q")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(func=cmd_gvalue)

    s = sub.add_parser("moments", help="exact moments M_n(0..M)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-m", type=int, required=True)
    s.add_argument("--digits", type=int, default=20)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("closed-form", help="M_n(m) as a formula in n")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--format", choices=("json",), default="json")
    s.set_defaults(func=cmd_closed_form)

    s = sub.add_parser("pe", help="series error probability versus SNR")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--snr-db", required=True, help="A:B:STEP")
    s.add_argument("--tol", default="1e-16")
    s.add_argument("--max-terms", type=int, default=2000)
    s.add_argument("--format", choices=("csv",), default="csv")
    s.set_defaults(func=cmd_pe)

    s = sub.add_parser("e8-bound", help="E_8 union bound versus SNR")
    s.add_argument("--snr-db", required=True, help="A:B:STEP")
    s.set_defaults(func=cmd_e8_bound)

    s = sub.add_parser("simulate", help="Monte-Carlo error probability")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--snr-db", required=True, help="A:B:STEP")
    s.add_argument("--min-errors", type=int, default=500)
    s.add_argument("--max-trials", default="1e9")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--format", choices=("csv",), default="csv")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("decode", help="nearest A_n point")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--point", required=True, help="comma-separated coordinates (n+1 of them)")
    s.set_defaults(func=cmd_decode)

    s = sub.add_parser("figure1", help="all error-probability curves plus a manifest")
    s.add_argument("--output-dir", required=True)
    s.add_argument("--snr-db", default="0:16:0.5")
    s.add_argument("--tol", default="1e-16")
    s.add_argument("--max-terms", type=int, default=2000)
    s.add_argument("--min-errors", type=int, default=500)
    s.add_argument("--max-trials", default="4e6")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--no-mc", action="store_true", help="skip the Monte-Carlo curves")
    s.set_defaults(func=cmd_figure1)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args, out)
    except (UsageError, DomainError) as exc:
        parser.error(str(exc))  # exits with status 2
    except ValueError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
