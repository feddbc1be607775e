"""Command line front end.

Exit codes: 0 every verdict PASS, 1 some FAIL, 2 some INCONCLUSIVE (and no
FAIL), 3 usage or file syntax error, 4 validation error (fan, divisor or
precondition), 5 missing file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .cohomology import cohomology_dims, vanishing_scan
from .divisors import Divisor, ToricVariety, VarietyError, builtin, is_ample, is_nef
from .intersection import intersection_table, volume_oracle
from .lattice import Fan, FanError
from .morse import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    default_diagonals,
    default_window,
    random_subadditivity,
    verify_intermediate,
    verify_strong,
    verify_subadditivity,
    verify_weak,
)

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_INVALID, EXIT_MISSING = 3, 4, 5
JOBS_ENV = "TORICMORSE_JOBS"
CSV_COLUMNS = ["variety", "q", "k", "j", "kind", "measured", "bound_num", "bound_den",
               "margin_num", "margin_den", "verdict"]


class InputError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------

def parse_fan_file(path) -> Fan:
    """Read and fully validate a JSON fan ``{"rank", "rays", "max_cones"}``."""
    return load_variety(path).fan


def load_variety(path) -> ToricVariety:
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file", EXIT_MISSING)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise InputError(f"{path}:{err.lineno}:{err.colno}: {err.msg}", EXIT_USAGE) from err
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object", EXIT_USAGE)
    for key in ("rank", "rays", "max_cones"):
        if key not in data:
            raise InputError(f"{path}: missing key {key!r}", EXIT_USAGE)
    rank, rays, cones = data["rank"], data["rays"], data["max_cones"]
    if not isinstance(rank, int) or not _int_lists(rays) or not _int_lists(cones):
        raise InputError(f"{path}: rank must be an integer, rays and max_cones lists of integer lists",
                         EXIT_USAGE)
    try:
        fan = Fan(rank, rays, cones)
        return ToricVariety(fan, name=data.get("name", path.stem))
    except (FanError, VarietyError) as err:
        raise InputError(f"{path}: {err}") from err


def _int_lists(value) -> bool:
    return isinstance(value, list) and all(
        isinstance(v, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in v) for v in value
    )


def parse_coeffs(text: str) -> Divisor:
    try:
        return Divisor(int(x) for x in text.split(","))
    except ValueError as err:
        raise InputError(f"bad divisor {text!r}: expected comma-separated integers", EXIT_USAGE) from err


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as err:
        raise InputError(f"bad integer list {text!r}", EXIT_USAGE) from err


def _variety(args) -> ToricVariety:
    if args.fan:
        return load_variety(args.fan)
    if not args.builtin:
        raise InputError("one of --builtin or --fan is required", EXIT_USAGE)
    try:
        return builtin(args.builtin)
    except (ValueError, VarietyError) as err:
        raise InputError(str(err)) from err


def _divisor(X: ToricVariety, text, flag):
    if text is None:
        raise InputError(f"--{flag} is required", EXIT_USAGE)
    D = parse_coeffs(text)
    if len(D) != X.nrays:
        raise InputError(f"--{flag}: {X.name} has {X.nrays} rays, got {len(D)} coefficients")
    return D


def _ample_pair(X, args):
    F, G = _divisor(X, args.F, "F"), _divisor(X, args.G, "G")
    for label, D in (("F", F), ("G", G)):
        if not is_ample(X, D):
            raise InputError(f"{label} = ({D}) is not ample on {X.name}")
    return F, G


def _q_list(X, args) -> list[int]:
    qs = parse_int_list(args.q) if args.q else list(range(X.dim + 1))
    bad = [q for q in qs if not 0 <= q <= X.dim]
    if bad or not qs:
        raise InputError(f"q must lie in 0..{X.dim}, got {args.q}")
    return qs


def _k_range(X, args) -> range:
    kmax = args.kmax if args.kmax is not None else default_window(X.dim).stop - 1
    if kmax < args.kmin:
        raise InputError("empty k range")
    return range(args.kmin, kmax + 1)


def _diagonals(X, ks, args) -> tuple:
    if args.diagonals:
        return tuple(parse_int_list(args.diagonals)) or default_diagonals(X.dim, len(ks))
    return default_diagonals(X.dim, len(ks))


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# CSV records
# ---------------------------------------------------------------------------

def _frac(x):
    if x is None:
        return "", ""
    x = Fraction(x)
    return x.numerator, x.denominator


def _cell(x):
    return "" if x is None else x


def report_records(report) -> list[list]:
    """One CSV record per measured row plus one summary record per verdict."""
    records = []
    for row in report.rows:
        records.append([report.variety, report.q, row.k, _cell(row.j), report.kind, row.measured,
                        *_frac(row.bound), *_frac(row.margin), "ok" if row.ok else "above"])
    summaries = report.parts or (report,)
    for part in summaries:
        kind = f"{part.kind}-summary"
        if part.label:
            kind += f":{part.label}"
        for flag in part.flags:
            kind += f"+{flag}"
        fit = part.fit
        gap = part.coefficient - fit.coefficient if fit.conclusive else None
        records.append([part.variety, part.q, "", "", kind, "", *_frac(part.coefficient), *_frac(gap),
                        part.verdict])
    return records


def subadditivity_records(variety, draws) -> list[list]:
    records = []
    for index, row in enumerate(draws):
        coeffs = " ".join(str(c) for c in row.divisor)
        records.append([variety, row.q, index, row.ray, f"subadditivity:B={coeffs}", row.chi_b,
                        row.chi_a + row.chi_c, 1, row.chi_a + row.chi_c - row.chi_b, 1,
                        "ok" if row.ok else "above"])
    verdict = PASS if all(r.ok for r in draws) else FAIL
    records.append([variety, "", "", "", "subadditivity-summary", "", "", "", "", "", verdict])
    return records


def vanishing_records(variety, result) -> list[list]:
    records = []
    for k, a, dims in result.nonvanishing:
        records.append([variety, "", k, a, "vanishing", sum(dims[1:]), 0, 1, -sum(dims[1:]), 1, "above"])
    verdict = PASS if result.found else FAIL
    records.append([variety, "", _cell(result.k0), "", "vanishing-summary", "", 0, 1, "", "", verdict])
    return records


def intersection_records(variety, table) -> list[list]:
    return [[variety, i, "", "", "intersection", x, "", "", "", "", ""] for i, x in enumerate(table)]


def write_csv(records, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(records)


def _emit_csv(records, target):
    if not target:
        return
    if target == "-":
        write_csv(records, sys.stdout)
        return
    buffer = io.StringIO()
    write_csv(records, buffer)
    Path(target).write_text(buffer.getvalue())


def _exit_for(verdicts) -> int:
    verdicts = list(verdicts)
    if FAIL in verdicts:
        return EXIT_FAIL
    if INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


# ---------------------------------------------------------------------------
# jobs (top level so they pickle into worker processes)
# ---------------------------------------------------------------------------

def _job(spec):
    kind, X, payload = spec
    if kind == "weak":
        F, G, q, ks = payload
        report = verify_weak(X, F, G, q, ks)
        return report_records(report), [report.verdict], [report.summary()]
    if kind == "strong":
        F, G, q, ks = payload
        report = verify_strong(X, F, G, q, ks)
        return report_records(report), [report.verdict], [report.summary()]
    if kind == "intermediate":
        F, G, a, q, ks, flavour, diagonals = payload
        report = verify_intermediate(X, F, G, a, q, None, ks, flavour, diagonals)
        return report_records(report), [report.verdict], [p.summary() for p in report.parts]
    if kind == "subadditivity":
        draws, seed = payload
        rows = random_subadditivity(X, draws, seed)
        records = subadditivity_records(X.name, rows)
        ok = sum(r.ok for r in rows)
        return records, [records[-1][-1]], [f"{X.name} subadditivity: {ok}/{len(rows)} draws hold"]
    if kind == "vanishing":
        F, H, kmax, amax = payload
        result = vanishing_scan(X, F, H, kmax, amax)
        records = vanishing_records(X.name, result)
        return records, [records[-1][-1]], [f"{X.name} vanishing scan: {result}"]
    if kind == "intersect":
        F, G = payload
        table = intersection_table(X, F, G)
        return intersection_records(X.name, table), [], [f"{X.name} intersection table: {_join(table)}"]
    raise ValueError(kind)


def _run_jobs(specs, jobs):
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_job, specs))
    else:
        results = [_job(s) for s in specs]
    records, verdicts, lines = [], [], []
    for r, v, s in results:
        records += r
        verdicts += v
        lines += s
    return records, verdicts, lines


def _join(values) -> str:
    return ",".join(str(v) for v in values)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_cohomology(args) -> int:
    X = _variety(args)
    D = _divisor(X, args.D, "D")
    profile = cohomology_dims(X, D)
    print(_join(profile.dims))
    return EXIT_PASS


def cmd_intersect(args) -> int:
    X = _variety(args)
    F, G = _divisor(X, args.F, "F"), _divisor(X, args.G, "G")
    table = intersection_table(X, F, G)
    print(_join(table))
    if args.check_volume:
        for label, D, entry in (("F", F, table[0]), ("G", G, table[-1])):
            if is_nef(X, D):
                print(f"volume oracle {label}^{X.dim} = {volume_oracle(X, D)} (table {entry})")
    _emit_csv(intersection_records(X.name, table), args.csv)
    return EXIT_PASS


def _verify_cmd(kind):
    def command(args) -> int:
        X = _variety(args)
        F, G = _ample_pair(X, args)
        ks = _k_range(X, args)
        specs = [(kind, X, (F, G, q, ks)) for q in _q_list(X, args)]
        records, verdicts, lines = _run_jobs(specs, _jobs(args))
        print("\n".join(lines))
        _emit_csv(records, args.csv)
        return _exit_for(verdicts)
    return command


def cmd_intermediate(args) -> int:
    X = _variety(args)
    F, G = _ample_pair(X, args)
    if args.a < 1:
        raise InputError("--a must be at least 1")
    ks = _k_range(X, args)
    flavours = ["weak", "strong"] if args.kind == "both" else [args.kind]
    diagonals = _diagonals(X, ks, args)
    if min(diagonals) < 1:
        raise InputError("--diagonals must be positive integers")
    specs = [("intermediate", X, (F, G, args.a, q, ks, flavour, diagonals))
             for flavour in flavours for q in _q_list(X, args)]
    records, verdicts, lines = _run_jobs(specs, _jobs(args))
    print("\n".join(lines))
    _emit_csv(records, args.csv)
    return _exit_for(verdicts)


def cmd_subadditivity(args) -> int:
    X = _variety(args)
    if args.B is not None:
        B = _divisor(X, args.B, "B")
        qs = _q_list(X, args)
        rows = [verify_subadditivity(X, B, args.rho, q) for q in qs]
        for r in rows:
            print(f"q={r.q} rho={r.ray}: chi_q(B)={r.chi_b} <= chi_q(B-D)={r.chi_a} + chi_q(B|D)={r.chi_c}"
                  f" -> {'ok' if r.ok else 'VIOLATED'}")
        records = subadditivity_records(X.name, rows)
        verdicts = [records[-1][-1]]
    else:
        records, verdicts, lines = _run_jobs([("subadditivity", X, (args.draws, args.seed))], 1)
        print("\n".join(lines))
    _emit_csv(records, args.csv)
    return _exit_for(verdicts)


def cmd_vanishing(args) -> int:
    X = _variety(args)
    F, H = _divisor(X, args.F, "F"), _divisor(X, args.H, "H")
    for label, D in (("F", F), ("H", H)):
        if not is_ample(X, D):
            raise InputError(f"{label} = ({D}) is not ample on {X.name}")
    result = vanishing_scan(X, F, H, args.kmax or 10, args.amax)
    print(f"{X.name} vanishing scan: {result}")
    records = vanishing_records(X.name, result)
    _emit_csv(records, args.csv)
    return _exit_for([records[-1][-1]])


def report_specs(X, F, G, H, ks, args):
    qs = _q_list(X, args)
    diagonals = _diagonals(X, ks, args)
    specs = [("intersect", X, (F, G))]
    specs += [("weak", X, (F, G, q, ks)) for q in qs]
    specs += [("strong", X, (F, G, q, ks)) for q in qs]
    specs += [("intermediate", X, (F, G, 1, q, ks, flavour, diagonals))
              for flavour in ("weak", "strong") for q in qs]
    specs.append(("subadditivity", X, (args.draws, args.seed)))
    specs.append(("vanishing", X, (F, H, 10, 5)))
    return specs


def cmd_report(args) -> int:
    X = _variety(args)
    F, G = _ample_pair(X, args)
    H = _divisor(X, args.H, "H") if args.H else G
    if not is_ample(X, H):
        raise InputError(f"H = ({H}) is not ample on {X.name}")
    ks = _k_range(X, args)
    records, verdicts, lines = _run_jobs(report_specs(X, F, G, H, ks, args), _jobs(args))
    print("\n".join(lines))
    _emit_csv(records, args.csv)
    return _exit_for(verdicts)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="toricmorse",
                     description="Exact line bundle cohomology on smooth projective toric varieties "
                                 "and asymptotic Morse inequality checks for L = F - G.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--builtin", help="P2, P3, P(4), P1xP1, P1xP1xP1, P1xP2, Hirzebruch(r) or Fr")
        src.add_argument("--fan", help="JSON fan file with keys rank, rays, max_cones")
        p.add_argument("--csv", help="write CSV here ('-' for stdout)")
        p.add_argument("--jobs", type=int, help=f"worker processes (default ${JOBS_ENV} or 1)")

    def pair(p):
        p.add_argument("--F", help="comma-separated ray coefficients of F")
        p.add_argument("--G", help="comma-separated ray coefficients of G")

    def window(p):
        p.add_argument("--q", help="comma-separated q values (default 0..n)")
        p.add_argument("--kmin", type=int, default=1)
        p.add_argument("--kmax", type=int, help="default 24 / 14 / 8 for dimension 2 / 3 / 4")

    p = sub.add_parser("cohomology", help="print h^0..h^n of O(D)")
    common(p)
    p.add_argument("--D", help="comma-separated ray coefficients")
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("intersect", help="print F^n, F^(n-1)G, ..., G^n")
    common(p)
    pair(p)
    p.add_argument("--check-volume", action="store_true", help="compare ends with the Ehrhart volume")
    p.set_defaults(func=cmd_intersect)

    for name, kind in (("verify-weak", "weak"), ("verify-strong", "strong")):
        p = sub.add_parser(name, help=f"{kind} asymptotic Morse inequality for k(F - G)")
        common(p)
        pair(p)
        window(p)
        p.set_defaults(func=_verify_cmd(kind))

    p = sub.add_parser("verify-intermediate", help="bounds for kF - jaG on the grid 0 <= j <= k")
    common(p)
    pair(p)
    window(p)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--kind", choices=["weak", "strong", "both"], default="both")
    p.add_argument("--diagonals", help="verdict diagonals j = floor(k/c) (default: 1,2,3 as the window allows)")
    p.set_defaults(func=cmd_intermediate)

    p = sub.add_parser("verify-subadditivity", help="chi_q(B) <= chi_q(B - D_rho) + chi_q(B|D_rho)")
    common(p)
    p.add_argument("--B", help="divisor; omit for a randomized matrix")
    p.add_argument("--rho", type=int, default=0)
    p.add_argument("--q")
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_subadditivity)

    p = sub.add_parser("vanishing-scan", help="least k0 with h^q(kF + aH) = 0 for q >= 1")
    common(p)
    p.add_argument("--F")
    p.add_argument("--H")
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--amax", type=int, default=5)
    p.set_defaults(func=cmd_vanishing)

    p = sub.add_parser("report", help="all checks for one (F, G) pair as one CSV")
    common(p)
    pair(p)
    window(p)
    p.add_argument("--H", help="ample divisor for the vanishing scan (default G)")
    p.add_argument("--diagonals")
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_report)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
