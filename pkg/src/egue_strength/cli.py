"""Command-line front end.

Exit codes: 0 success, 2 a table or Monte Carlo check failed, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager
from fractions import Fraction
from typing import Sequence

from . import removal, spinless, two_species
from .edgeworth import EdgeworthParams, density_grid
from .errors import EgueError
from .fock import mc_moment_table
from .moments import CumulantSet
from .tables import LAYOUT, check_table, load_reference, printed_digits

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 2, 64
SCENARIOS = ("spinless", "two-species", "removal", "addition")
CUMULANT_KEYS = ("xi", "k40", "k04", "k31", "k13", "k22")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # the same flags are accepted before and after the subcommand
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--out", default=d(None), help="output file (default: stdout)")
    g.add_argument("--format", choices=("csv", "json", "pretty-table"), default=d(None),
                   help="output format (default depends on the subcommand)")
    g.add_argument("--precision", type=int, default=d(6),
                   help="significant digits in csv and pretty-table output (default 6)")
    g.add_argument("--seed", type=int, default=d(0), help="master seed for Monte Carlo runs")
    g.add_argument("--threads", type=int, default=d(1), help="worker threads")
    return p


def _scenario_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario parameters")
    g.add_argument("--scenario", choices=SCENARIOS, default="spinless")
    for name in ("N", "m", "k", "t", "k0", "N1", "m1", "N2", "m2"):
        g.add_argument(f"--{name}", type=int)
    g.add_argument("--boson", action="store_true", help="boson statistics (spinless only)")
    g.add_argument("--vh", action="append", default=[], metavar="I,J,VALUE",
                   help="two-species V_H^2(i,j) override; repeatable")
    g.add_argument("--v2-h", default="1", help="V_H^2 (spinless, removal)")
    g.add_argument("--v2-o", default="1", help="V_O^2")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="egue-strength", parents=[_global_flags(False)],
                     description="Bivariate moments and cumulants of EGUE transition strengths.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    common = [_global_flags(True)]

    p = sub.add_parser("table", parents=common, help="recompute a reference table and check it")
    p.add_argument("--which", type=int, required=True, help="table number 1-4")
    p.add_argument("--rows", action="append", default=[],
                   help="1-based row numbers, comma separated or repeated")

    p = sub.add_parser("cumulants", parents=common, help="xi and fourth-order cumulants")
    _scenario_args(p)
    p.add_argument("--mode", choices=("exact", "asymptotic"), default="exact")

    p = sub.add_parser("density", parents=common, help="Edgeworth-corrected density grid")
    _scenario_args(p)
    p.add_argument("--mode", choices=("exact", "asymptotic"), default="exact")
    p.add_argument("--from-json", metavar="FILE",
                   help="read xi and k_rs from a cumulants JSON record")
    for key in CUMULANT_KEYS + ("k30", "k21", "k12", "k03"):
        p.add_argument(f"--{key}", type=float)
    p.add_argument("--half-range", type=float, default=6.0)
    p.add_argument("--n", type=int, default=601, help="odd number of points per axis")

    p = sub.add_parser("validate", parents=common,
                       help="compare closed-form moments with a Monte Carlo ensemble")
    _scenario_args(p)
    p.add_argument("--members", type=int, default=2000)
    return parser


# -- parameter assembly ------------------------------------------------------

def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"scenario {args.scenario!r} needs " + ", ".join("--" + n for n in missing))
    return [getattr(args, n) for n in names]


def _fraction(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{flag} expects a rational number, got {text!r}") from None


def _vh(items: list[str]) -> dict[tuple[int, int], Fraction]:
    out = {}
    for item in items:
        parts = item.split(",")
        if len(parts) != 3:
            raise UsageError(f"--vh expects i,j,value, got {item!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise UsageError(f"--vh expects integer i,j, got {item!r}") from None
        out[i, j] = _fraction(parts[2], "--vh")
    return out


def scenario_params(args):
    v2_h, v2_o = _fraction(args.v2_h, "--v2-h"), _fraction(args.v2_o, "--v2-o")
    if args.scenario == "spinless":
        N, m, k, t = _need(args, "N", "m", "k", "t")
        return spinless.SpinlessParams(N, m, k, t, v2_h, v2_o,
                                       "boson" if args.boson else "fermion")
    if args.boson:
        raise UsageError("--boson applies to the spinless scenario only")
    if args.scenario == "two-species":
        N1, m1, N2, m2, k, k0 = _need(args, "N1", "m1", "N2", "m2", "k", "k0")
        return two_species.TwoSpeciesParams(N1, m1, N2, m2, k, k0, _vh(args.vh) or None, v2_o)
    N, m, k, k0 = _need(args, "N", "m", "k", "k0")
    if args.scenario == "addition":
        return removal.RemovalParams(N, m + k0, k, k0, v2_h, v2_o)
    return removal.RemovalParams(N, m, k, k0, v2_h, v2_o)


def scenario_cumulants(args) -> CumulantSet:
    p = scenario_params(args)
    if args.scenario == "spinless":
        if args.mode == "exact":
            return spinless.cumulants_exact(p)
        return spinless.cumulants_asymptotic(p)
    if args.scenario == "two-species":
        return two_species.cumulants_two(p, args.mode)
    if args.scenario == "addition":
        return removal.cumulants_addition(p.N, args.m, p.k, p.k0, args.mode)
    return removal.cumulants_removal(p, args.mode)


def scenario_moments(p):
    if isinstance(p, spinless.SpinlessParams):
        return spinless.moments(p)
    if isinstance(p, two_species.TwoSpeciesParams):
        return two_species.moments_two(p)
    return removal.moments_removal(p)


# -- output ------------------------------------------------------------------

@contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _fmt(v, precision: int) -> str:
    if isinstance(v, float):
        return f"{v:.{precision}g}"
    return str(v)


def _write_records(fh, records: list[dict], fmt: str, precision: int) -> None:
    if fmt == "json":
        payload = records[0] if len(records) == 1 else records
        fh.write(json.dumps(payload, indent=2) + "\n")
        return
    cols = list(records[0])
    for rec in records[1:]:
        cols += [c for c in rec if c not in cols]
    if fmt == "csv":
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for rec in records:
            w.writerow([_fmt(rec.get(c, ""), precision) for c in cols])
        return
    cells = [[_fmt(rec.get(c, ""), precision) for c in cols] for rec in records]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    fh.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for row in cells:
        fh.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


# -- subcommands -------------------------------------------------------------

def _printed(v: float, which: int) -> str:
    r = printed_digits(v, which)
    return "0" if r == 0 else f"{r:g}"


def render_table_row(which: int, row) -> str:
    _, cols, has_asy = LAYOUT[which]
    key = " ".join(str(x) for x in row.key)
    if has_asy:
        cells = [f"{_printed(row.exact[c], which)}({_printed(row.asymptotic[c], which)})"
                 for c in cols]
        return " | ".join([key, *cells])
    return key + " | " + " ".join(_printed(row.exact[c], which) for c in cols)


def _parse_rows(items: list[str]) -> list[int]:
    out = []
    for item in items:
        for tok in item.split(","):
            try:
                out.append(int(tok))
            except ValueError:
                raise UsageError(f"--rows expects integers, got {tok!r}") from None
    return out


def cmd_table(args) -> int:
    which = args.which
    if which not in LAYOUT:
        raise UsageError(f"unknown table {which}; choose 1, 2, 3 or 4")
    rows = check_table(which, _parse_rows(args.rows))
    keys, cols, has_asy = LAYOUT[which]
    fmt = args.format or "pretty-table"
    with _output(args.out) as fh:
        if fmt == "pretty-table":
            fh.write(" ".join(keys) + " | " + (" | " if has_asy else " ").join(cols) + "\n")
            for row in rows:
                fh.write(render_table_row(which, row) + "\n")
        else:
            recs = []
            for row in rows:
                rec = dict(zip(keys, row.key))
                for c in cols:
                    rec[c] = row.exact[c]
                    rec[c + "_reference"] = row.reference[c]
                    if has_asy:
                        rec[c + "_asy"] = row.asymptotic[c]
                        rec[c + "_asy_reference"] = row.reference[c + "_asy"]
                rec["ok"] = row.ok
                recs.append(rec)
            _write_records(fh, recs, fmt, args.precision)
    failed = False
    for row in rows:
        for note in row.rounding_notes:
            print(f"note: row {row.key}: {note}", file=sys.stderr)
        for msg in row.mismatches:
            failed = True
            print(f"mismatch: row {row.key}: {msg}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_cumulants(args) -> int:
    rec = scenario_cumulants(args).as_dict()
    with _output(args.out) as fh:
        _write_records(fh, [rec], args.format or "json", args.precision)
    return EXIT_OK


def _density_params(args) -> EdgeworthParams:
    if args.from_json:
        with open(args.from_json, encoding="utf-8") as fh:
            rec = json.load(fh)
        if isinstance(rec, list):
            if len(rec) != 1:
                raise UsageError("--from-json expects a single cumulant record")
            rec = rec[0]
        try:
            vals = {k: float(rec[k]) for k in CUMULANT_KEYS}
        except KeyError as exc:
            raise UsageError(f"cumulant record lacks {exc.args[0]!r}") from None
        extra = {k: float(rec[k]) for k in ("k30", "k21", "k12", "k03") if k in rec}
        return EdgeworthParams(**vals, **extra)
    if args.xi is not None:
        kw = {k: getattr(args, k) for k in CUMULANT_KEYS + ("k30", "k21", "k12", "k03")
              if getattr(args, k) is not None}
        return EdgeworthParams(**kw)
    if any(getattr(args, n) is not None for n in ("N", "N1")):
        return EdgeworthParams.from_cumulants(scenario_cumulants(args))
    raise UsageError("density needs --from-json, --xi (and cumulants) or scenario parameters")


def cmd_density(args) -> int:
    grid = density_grid(_density_params(args), args.half_range, args.n, threads=args.threads)
    fmt = args.format or "csv"
    with _output(args.out) as fh:
        if fmt == "csv":
            grid.write_csv(fh)
        elif fmt == "json":
            fh.write(json.dumps({"x": grid.x_points.tolist(), "y": grid.y_points.tolist(),
                                 "density": grid.values.tolist(),
                                 "cell_area": grid.cell_area}) + "\n")
        else:
            _write_records(fh, [{"points": args.n, "half_range": args.half_range,
                                 "mass": grid.mass(), "min_value": grid.min_value,
                                 "max_value": float(grid.values.max())}],
                           "pretty-table", args.precision)
    if grid.min_value < 0:
        print(f"note: density reaches {grid.min_value:.3g} in the tails", file=sys.stderr)
    return EXIT_OK


def validation_records(p, members: int, seed: int, threads: int) -> list[dict]:
    """One record per moment with P + Q <= 4; M22 is reported but not gating."""
    ms = scenario_moments(p)
    mc = mc_moment_table(p, members, seed, threads)
    recs = []
    for (P, Q), (mean, se) in sorted(mc.items(), key=lambda kv: (sum(kv[0]), kv[0])):
        exact = float(ms.get(P, Q))
        if se > 0:
            z = (mean - exact) / se
        else:
            z = 0.0 if mean == exact else float("inf")
        gating = (P, Q) != (2, 2)
        recs.append({"moment": f"M{P}{Q}", "closed_form": exact, "mc_mean": mean,
                     "std_error": se, "z": z, "gating": gating,
                     "pass": (abs(z) <= 3) if gating else None})
    return recs


def cmd_validate(args) -> int:
    if args.members < 2:
        raise UsageError("--members must be at least 2")
    p = scenario_params(args)
    recs = validation_records(p, args.members, args.seed, args.threads)
    with _output(args.out) as fh:
        _write_records(fh, recs, args.format or "pretty-table", args.precision)
    ok = all(r["pass"] for r in recs if r["gating"])
    print(f"{'PASS' if ok else 'FAIL'}: {args.members} members, seed {args.seed}"
          " (M22 uses the hybrid closed form and is not gating)", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"table": cmd_table, "cumulants": cmd_cumulants, "density": cmd_density,
            "validate": cmd_validate}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision < 1 or args.threads < 1:
        parser.error("--precision and --threads must be positive")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, EgueError) as exc:
        print(f"egue-strength: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
