"""The ``lf`` command line tool.

Exit codes: 0 success, 1 rejected (diagnostic or not equal), 2 out of fuel,
3 I/O, usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import fol
from .declarative import check_derivation
from .equivalence import Equal, NotEqual, fam_equiv, kind_equiv, obj_equiv, obj_equiv_q
from .erasure import erase_ctx, erase_family, erase_kind, erase_sig
from .errors import FUEL_DEFAULT, CheckError, Diagnostic, Fuel, FuelExhausted, LFError, ParseError
from .surface import (
    parse_context,
    parse_derivation,
    parse_qcan,
    parse_signature,
    parse_term,
    print_qcan,
    print_term,
)
from .syntax import TYPE, Context, Signature, is_family, is_object
from .typecheck import Checker

EXIT_OK, EXIT_REJECTED, EXIT_FUEL, EXIT_INPUT = 0, 1, 2, 3
STATUS = {EXIT_OK: "ok", EXIT_REJECTED: "error", EXIT_FUEL: "fuel", EXIT_INPUT: "error"}


@dataclass
class Report:
    code: int = EXIT_OK
    result: str | None = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": STATUS[self.code],
            "diagnostics": [d.to_json() for d in self.diagnostics],
            "result": self.result,
        }


class _Input(Exception):
    """Bad input: unreadable file, malformed text, or misuse of flags."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _Input(Diagnostic("IOError", f"cannot read {path}: {exc}")) from None


def _parse(thunk):
    try:
        return thunk()
    except ParseError as exc:
        raise _Input(exc.diagnostic) from None


def _load_sig(path: str) -> tuple[Signature, dict]:
    text = _read(path)
    return _parse(lambda: parse_signature(text))


def _checker(args, sig: Signature, spans: dict) -> Checker:
    try:
        return Checker(sig, Fuel(args.fuel))
    except (CheckError, FuelExhausted) as exc:
        d = exc.diagnostic
        if d.decl is not None and d.decl in spans:
            exc.diagnostic = d.with_span(spans[d.decl])
        raise


def _context(args, sig: Signature) -> Context:
    return _parse(lambda: parse_context(args.ctx or "", sig))


# -- verbs ----------------------------------------------------------------------


def cmd_check(args) -> Report:
    sig, spans = _load_sig(args.signature)
    _checker(args, sig, spans)
    return Report(result=f"{len(sig)} declarations")


def cmd_synth(args) -> Report:
    sig, spans = _load_sig(args.signature)
    checker = _checker(args, sig, spans)
    gamma = _context(args, sig)
    t = _parse(lambda: parse_term(args.term, sig, args.level))
    fuel = Fuel(args.fuel)
    if args.level == "obj":
        return Report(result=print_term(checker.synth_obj(gamma, t, fuel), sig))
    if args.level == "fam":
        return Report(result=print_term(checker.synth_fam(gamma, t, fuel), sig))
    checker.check_kind(gamma, t, fuel)
    return Report(result="kind")


def cmd_equiv(args) -> Report:
    sig, spans = _load_sig(args.signature)
    checker = _checker(args, sig, spans)
    gamma = _context(args, sig)
    checker.check_ctx(gamma, Fuel(args.fuel))
    left = _parse(lambda: parse_term(args.left, sig))
    level = "obj" if is_object(left) else "fam" if is_family(left) else "kind"
    right = _parse(lambda: parse_term(args.right, sig, level))
    ssig, delta, fuel = erase_sig(sig), erase_ctx(gamma), Fuel(args.fuel)
    if level == "kind":
        if args.at is not None:
            raise _Input(Diagnostic("Usage", "--at is not used when comparing kinds"))
        verdict = kind_equiv(ssig, delta, left, right, fuel)
    elif level == "fam":
        at = TYPE if args.at is None else _parse(lambda: parse_term(args.at, sig, "kind"))
        verdict = fam_equiv(ssig, delta, left, right, erase_kind(at), fuel)
    else:
        if args.at is None:
            raise _Input(Diagnostic("Usage", "comparing objects needs --at FAMILY"))
        at = _parse(lambda: parse_term(args.at, sig, "fam"))
        verdict = obj_equiv(ssig, delta, left, right, erase_family(at), fuel)
    if isinstance(verdict, Equal):
        return Report(result="Equal")
    if isinstance(verdict, NotEqual):
        return Report(EXIT_REJECTED, "NotEqual", [verdict.reason])
    reason = verdict.reason or Diagnostic("OutOfFuel", "step budget exhausted")
    return Report(EXIT_FUEL, "OutOfFuel", [reason])


def cmd_qnf(args) -> Report:
    sig, spans = _load_sig(args.signature)
    checker = _checker(args, sig, spans)
    gamma = _context(args, sig)
    m = _parse(lambda: parse_term(args.term, sig, "obj"))
    fuel = Fuel(args.fuel)
    a = checker.synth_obj(gamma, m, fuel)
    ssig, delta = erase_sig(sig), erase_ctx(gamma)
    if args.at is not None:
        want = _parse(lambda: parse_term(args.at, sig, "fam"))
        checker.synth_fam(gamma, want, fuel)
        verdict = fam_equiv(ssig, delta, a, want, erase_kind(TYPE), fuel)
        if not isinstance(verdict, Equal):
            if isinstance(verdict, NotEqual):
                msg = f"term has type {print_term(a, sig)}, not {print_term(want, sig)}"
                return Report(EXIT_REJECTED, None, [Diagnostic("TypeMismatch", msg, verdict.reason.path)])
            raise FuelExhausted()
    q = obj_equiv_q(ssig, delta, m, m, erase_family(a), fuel)
    if q is None:  # unreachable for well-typed terms
        return Report(EXIT_REJECTED, None, [Diagnostic("NoQuasicanonicalForm", "algorithm rejected the term")])
    return Report(result=print_qcan(q, sig))


def cmd_check_deriv(args) -> Report:
    text = _read(args.derivation)
    root = _parse(lambda: parse_derivation(text))
    check_derivation(root)
    return Report(result=f"accepted {root.rule}")


def _fol_names(args) -> list:
    from .surface import parse_name

    return [parse_name(v.strip()) for v in (args.vars or "").split(",") if v.strip()]


def cmd_fol_encode(args) -> Report:
    names = _fol_names(args)
    if args.sort == "term":
        t = _parse(lambda: fol.parse_fol_term(args.text))
        q, a = fol.encode_term(names, t), fol.IOTA
    else:
        phi = _parse(lambda: fol.parse_fol_formula(args.text))
        q, a = fol.encode_formula(names, phi), fol.OMICRON
    if args.elaborate:
        from .syntax import AConst

        gamma = Context.from_decls([(x, AConst(fol.IOTA)) for x in names])
        m = fol.elaborate(q, AConst(a), fol.SIGMA_FO, gamma)
        return Report(result=print_term(m, fol.SIGMA_FO))
    return Report(result=print_qcan(q, fol.SIGMA_FO))


def cmd_fol_decode(args) -> Report:
    names = _fol_names(args)
    q = _parse(lambda: parse_qcan(args.text, fol.SIGMA_FO))
    decoded = fol.decode_term(names, q) if args.sort == "term" else fol.decode_formula(names, q)
    return Report(result=fol.print_fol(decoded))


# -- driver ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=FUEL_DEFAULT, help="step budget per query (default %(default)s)")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--quiet", action="store_true", help="print nothing; rely on the exit code")

    parser = argparse.ArgumentParser(prog="lf", description="LF typechecking and equivalence kernel")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a signature file")
    p.add_argument("signature")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("synth", parents=[common], help="synthesize the type or kind of a term")
    p.add_argument("signature")
    p.add_argument("term")
    p.add_argument("--ctx", default="", help="context as 'x : A, y : B', oldest first")
    p.add_argument("--level", choices=["obj", "fam", "kind"], default="obj")
    p.set_defaults(run=cmd_synth)

    p = sub.add_parser("equiv", parents=[common], help="decide algorithmic equivalence of two terms")
    p.add_argument("signature")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--ctx", default="")
    p.add_argument("--at", help="family (for objects) or kind (for families) to compare at")
    p.set_defaults(run=cmd_equiv)

    p = sub.add_parser("qnf", parents=[common], help="print the quasicanonical form of a well-typed object")
    p.add_argument("signature")
    p.add_argument("term")
    p.add_argument("--ctx", default="")
    p.add_argument("--at", help="expected family")
    p.set_defaults(run=cmd_qnf)

    p = sub.add_parser("check-deriv", parents=[common], help="check a derivation file")
    p.add_argument("derivation")
    p.set_defaults(run=cmd_check_deriv)

    for verb, run, what in (("fol-encode", cmd_fol_encode, "first-order syntax"), ("fol-decode", cmd_fol_decode, "quasicanonical form")):
        p = sub.add_parser(verb, parents=[common], help=f"translate {what}")
        p.add_argument("text")
        p.add_argument("--vars", default="", help="comma-separated variables in scope")
        p.add_argument("--sort", choices=["formula", "term"], default="formula")
        if verb == "fol-encode":
            p.add_argument("--elaborate", action="store_true", help="print the typed LF object instead")
        p.set_defaults(run=run)
    return parser


def run(argv: list[str] | None = None) -> tuple[int, str]:
    """Execute one invocation; returns the exit code and the standard output text."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_INPUT), ""
    if args.fuel < 0:
        report = Report(EXIT_INPUT, None, [Diagnostic("Usage", "--fuel must be non-negative")])
    else:
        try:
            report = args.run(args)
        except _Input as exc:
            report = Report(EXIT_INPUT, None, [exc.diagnostic])
        except FuelExhausted as exc:
            report = Report(EXIT_FUEL, None, [exc.diagnostic])
        except LFError as exc:
            report = Report(EXIT_REJECTED, None, [exc.diagnostic])
    if args.quiet:
        return report.code, ""
    if args.json:
        return report.code, json.dumps(report.to_json(), indent=2, ensure_ascii=False) + "\n"
    lines = []
    for d in report.diagnostics:
        lines.append(str(d))
        if d.path:
            lines.append("  at " + " > ".join(d.path))
    if report.result is not None:
        lines.insert(0, report.result)
    return report.code, "".join(line + "\n" for line in lines)


def main(argv: list[str] | None = None) -> int:
    code, out = run(argv)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
