"""Command-line front end: ``polydual <command> [FILE] [flags]``.

Exit codes: 0 on success, 1 on input errors and failed verification runs,
2 when a qualification fails (always for ``kkt``, whose hypotheses are
mandatory; for the reports only under ``--require-qualified``).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .coderivative import coderivative
from .conjugate import conjugate, conjugate_value
from .errors import PolydualError, QualificationError
from .fenchel import fenchel_report
from .geometry import prune, vrep
from .lagrange import improving_point, kkt_find, primal_value, slater_status, strong_duality_report
from .problemfile import ParseError, format_expr, format_poly, parse_problem
from .rational import fmt, fmt_vec
from .suites import SUITES, emit_csv, run_suite

EXIT_OK, EXIT_INPUT, EXIT_QUALIFICATION = 0, 1, 2
MAX_SEED = 2 ** 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; here 2 is reserved for qualification failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("count must be nonnegative")
    return value


def _dims(text: str) -> int:
    value = int(text)
    if not 1 <= value <= 4:
        raise argparse.ArgumentTypeError("dims must be between 1 and 4")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polydual", description="Exact duality and calculus for polyhedral convex problems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "conjugate": "conjugate of an expression, optionally evaluated at points",
        "fenchel": "Fenchel primal/dual values, gap and qualification flags",
        "lagrange": "Lagrangian primal/dual values and the Slater condition",
        "kkt": "KKT multipliers with a complementary-slackness table, or an improving point",
        "coderivative": "coderivative of a set-valued map at a graph point",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("file", type=Path, help="problem file")
        p.add_argument("--csv", type=Path, help="write the report row(s) to this CSV file")
        p.add_argument("--require-qualified", action="store_true",
                       help="exit with status 2 when the qualification condition fails")
    v = sub.add_parser("verify", help="run seeded property suites")
    v.add_argument("--suite", choices=sorted(SUITES), help="suite to run (default: all)")
    v.add_argument("--n", type=_count, default=100, help="instances per suite")
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--dims", type=_dims, default=3, help="maximal dimension of generated instances")
    v.add_argument("--csv", type=Path, help="write duality reports of the run to this CSV file")
    return parser


def _load(path: Path, kind: str):
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: {exc}") from exc
    try:
        pf = parse_problem(text)
    except ParseError as exc:
        raise UsageError(f"{path}:{exc.line}:{exc.column}: {exc.message}") from exc
    if pf.kind != kind:
        raise UsageError(f"{path}: file has kind {pf.kind!r}, command expects {kind!r}")
    return pf


def _write_csv(path: Path | None, rows):
    if path is not None:
        path.write_text(emit_csv(rows), encoding="utf-8")


def _opt(v) -> str:
    return "none" if v is None else fmt_vec(v)


def _cmd_conjugate(args, out) -> int:
    pf = _load(args.file, "conjugate")
    f = pf.fields["f"]
    out.write(f"f* = {format_expr(conjugate(f))}\n")
    for s in pf.fields.get("at", []):
        out.write(f"f*{fmt_vec(s)} = {fmt(conjugate_value(f, s))}\n")
    return EXIT_OK


def _report_lines(rep, out):
    out.write(f"p = {fmt(rep.p_hat)}\n")
    out.write(f"d = {fmt(rep.d_hat)}\n")
    out.write(f"gap = {fmt(rep.gap)}\n")
    for name, held in rep.qualification.items():
        out.write(f"qualification {name}: {'yes' if held else 'no'}\n")
    out.write(f"qualified = {str(rep.qualified).lower()}\n")
    out.write(f"attained = {str(rep.attained).lower()}\n")
    out.write(f"primal optimum = {_opt(rep.primal_opt)}\n")
    out.write(f"dual optimum = {_opt(rep.dual_opt)}\n")


def _cmd_fenchel(args, out) -> int:
    rep = fenchel_report(_load(args.file, "fenchel").problem())
    _report_lines(rep, out)
    _write_csv(args.csv, [(args.file.stem, rep)])
    return EXIT_QUALIFICATION if args.require_qualified and not rep.qualified else EXIT_OK


def _cmd_lagrange(args, out) -> int:
    prog = _load(args.file, "lagrange").problem()
    rep = strong_duality_report(prog)
    point, reason = slater_status(prog)
    out.write(f"slater point = {_opt(point)}" + ("" if point is not None else f" ({reason})") + "\n")
    _report_lines(rep, out)
    _write_csv(args.csv, [(args.file.stem, rep)])
    return EXIT_QUALIFICATION if args.require_qualified and not rep.qualified else EXIT_OK


def _cmd_kkt(args, out) -> int:
    pf = _load(args.file, "lagrange")
    prog = pf.problem()
    u = pf.fields.get("point")
    if u is None:
        p, u = primal_value(prog)
        if u is None:
            raise UsageError(f"{args.file}: no 'point' given and the program has no minimizer (p = {fmt(p)})")
    out.write(f"point = {fmt_vec(u)}\n")
    gam = kkt_find(prog, u)
    if gam is None:
        out.write("no KKT multipliers: the point is not optimal\n")
        better = improving_point(prog, u)
        out.write(f"improving point = {_opt(better)}\n")
        if better is not None:
            out.write(f"objective {fmt(prog.phi.eval(u))} -> {fmt(prog.phi.eval(better))}\n")
        return EXIT_OK
    out.write(f"gamma = {fmt_vec(gam.gammas)}\n")
    values = prog.psi_values(u)
    rows = [("i", "gamma_i", "psi_i(u)", "gamma_i*psi_i(u)")]
    rows += [(str(i + 1), fmt(g), fmt(v), fmt(s)) for i, (g, v, s) in enumerate(zip(gam.gammas, values, gam.slackness))]
    widths = [max(len(r[k]) for r in rows) for k in range(4)]
    for r in rows:
        out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    return EXIT_OK


def _cmd_coderivative(args, out) -> int:
    pf = _load(args.file, "coderivative")
    f = pf.fields
    value = prune(coderivative(f["map"], f["a"], f["b"], f["h"]).set)
    out.write(f"D*G(a,b)(h) = {format_poly(value)}\n")
    points, rays, lines = vrep(value)
    if not points:
        out.write("empty\n")
    for label, items in (("point", points), ("ray", rays), ("line", lines)):
        for v in items:
            out.write(f"{label} {fmt_vec(v)}\n")
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    names = [args.suite] if args.suite else list(SUITES)
    reports, ok = [], True
    for name in names:
        res = run_suite(name, args.n, args.seed, args.dims)
        reports += res.reports
        ok = ok and res.ok
        out.write(res.summary() + "\n" if args.suite else f"{name}: {res.summary()}\n")
        for iid, message in res.failures:
            out.write(f"  FAIL {iid}: {message}\n")
    _write_csv(args.csv, reports)
    return EXIT_OK if ok else EXIT_INPUT


_COMMANDS = {
    "conjugate": _cmd_conjugate,
    "fenchel": _cmd_fenchel,
    "lagrange": _cmd_lagrange,
    "kkt": _cmd_kkt,
    "coderivative": _cmd_coderivative,
    "verify": _cmd_verify,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except QualificationError as exc:
        err.write(f"qualification failure: {exc}\n")
        return EXIT_QUALIFICATION
    except PolydualError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
