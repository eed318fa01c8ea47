"""Command-line front end.

Exit codes: 0 when every check passes, 1 when at least one fails, 2 on bad
input.  ``--json`` prints one JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .algebra import HPoly, format_hpoly, parse_hpoly, stuffle, tau
from .genfun import (
    LEMMA33_PARTS,
    RelationReport,
    check_fg,
    check_lemma33,
    check_ohno,
    check_thm31,
    eval_f,
    eval_g,
    parse_lambda,
    residue_reconstruction,
    taylor_vs_ohno,
    make_report,
    thm31_case,
)
from .indices import BiSeq, dual_index, format_index, parse_index
from .mzv import eval_dn_image, eval_mzv, eval_zeta_tilde
from .nested import TAIL_MODES, EvalParams, NumValue
from .sweep import RELATIONS, SweepConfig, format_summary, iter_family, parse_config, run_sweep, summarize

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad input detected after argument parsing."""


def _add_eval_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prec", type=int, default=256, metavar="BITS", help="working precision in bits (default 256)")
    p.add_argument(
        "--cutoff",
        type=int,
        default=None,
        metavar="N",
        help="truncation point of the outer sum (default 128 with euler-maclaurin tails, 100000 otherwise)",
    )
    p.add_argument("--tail", choices=TAIL_MODES, default="euler-maclaurin", help="tail treatment")
    p.add_argument("--json", action="store_true", help="emit JSON lines")


def _params(args: argparse.Namespace) -> EvalParams:
    if args.prec < 64:
        raise UsageError("--prec must be at least 64")
    if args.cutoff is not None and args.cutoff < 10:
        raise UsageError("--cutoff must be at least 10")
    return EvalParams(prec_bits=args.prec, cutoff_N=args.cutoff, tail_mode=args.tail)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mzvkit", description="Multiple zeta values, Ohno's relation and its generating functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stuffle", help="harmonic product of two words")
    p.add_argument("w1", help='word over {x, y}, e.g. "xy" ("" is the empty word)')
    p.add_argument("w2")

    p = sub.add_parser("dual", help="dual of an admissible index")
    p.add_argument("index", help='comma list such as "3,1"')

    p = sub.add_parser("eval", help="evaluate a zeta value, a polynomial or a generating function")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--index", help="zeta(k1,...,km)")
    what.add_argument("--poly", help='admissible polynomial such as "2*xyxy + xxxy"')
    what.add_argument("--biseq", help='f (or g with --g) of a sequence "k1,l1;k2,l2"')
    p.add_argument("--dn", type=int, metavar="N", help="with --index: sum of zeta over the D_N image")
    p.add_argument("--lambda", dest="lambdas", action="append", default=[], metavar="P/Q")
    p.add_argument("--g", action="store_true", help="evaluate g instead of f")
    _add_eval_flags(p)

    p = sub.add_parser("check", help="run identity checks")
    p.add_argument("relation", choices=RELATIONS)
    p.add_argument("--index", help="index for ohno")
    p.add_argument("--shift", type=int, default=None, help="Ohno shift l (default 0..3 with --max-weight)")
    p.add_argument("--biseq", help='sequence "k1,l1;k2,l2"')
    p.add_argument("--word", help="word for duality")
    p.add_argument("--word2", help="second word for homomorphism")
    p.add_argument("--case", choices=("i", "ii", "iii", "iv"), help="thm31 case (inferred if omitted)")
    p.add_argument("--part", choices=LEMMA33_PARTS, help="lemma33 part")
    p.add_argument("--group", type=int, default=None, help="group position for lemma33 part ii")
    p.add_argument("--genfun", choices=("f", "g"), default="f")
    p.add_argument("--L", type=int, default=6, help="taylor degree")
    p.add_argument("--n-max", type=int, default=100, help="residue truncation")
    p.add_argument("--lambda", dest="lambdas", action="append", default=[], metavar="P/Q")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-weight", type=int, default=None, help="run the family over every instance up to this weight")
    _add_eval_flags(p)

    p = sub.add_parser("sweep", help="batch verification driven by a key=value config file")
    p.add_argument("config")
    p.add_argument("--out", help="write the JSON-lines report here instead of stdout")
    p.add_argument("--json", action="store_true", help="JSON lines on stdout (default when no --out)")
    return parser


# ---------------------------------------------------------------------------
# commands


def cmd_stuffle(args: argparse.Namespace) -> int:
    try:
        a, b = parse_hpoly(args.w1 or "1"), parse_hpoly(args.w2 or "1")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(format_hpoly(stuffle(a, b)))
    return EXIT_OK


def cmd_dual(args: argparse.Namespace) -> int:
    try:
        k = dual_index(parse_index(args.index))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(",".join(map(str, k)))
    return EXIT_OK


def _emit_value(label: str, v: NumValue, params: EvalParams, as_json: bool, extra: dict | None = None) -> None:
    if as_json:
        record = {"input": label, **(extra or {}), **v.to_json(), **params.to_json()}
        print(json.dumps(record))
    else:
        print(f"{label} = {v}")


def cmd_eval(args: argparse.Namespace) -> int:
    params = _params(args)
    try:
        if args.index is not None:
            k = parse_index(args.index)
            if args.dn is not None:
                _emit_value(f"D{args.dn} zeta{format_index(k)}", eval_dn_image(k, args.dn, params), params, args.json)
            else:
                _emit_value(f"zeta{format_index(k)}", eval_mzv(k, params), params, args.json)
        elif args.poly is not None:
            poly = parse_hpoly(args.poly)
            _emit_value(f"zeta~({format_hpoly(poly)})", eval_zeta_tilde(poly, params), params, args.json)
        else:
            bs = BiSeq.parse(args.biseq)
            fn, name = (eval_g, "g") if args.g else (eval_f, "f")
            for text in args.lambdas or ["0"]:
                lam = parse_lambda(text)
                _emit_value(f"{name}({bs}; {text})", fn(bs, lam, params), params, args.json, {"lambda": text})
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return EXIT_OK


def _single_checks(args: argparse.Namespace, params: EvalParams, lambdas: list[Fraction]) -> list[RelationReport]:
    rel, tol = args.relation, args.tol

    def need(value, flag: str):
        if value is None:
            raise UsageError(f"check {rel} needs {flag} (or --max-weight)")
        return value

    if rel == "ohno":
        k = parse_index(need(args.index, "--index"))
        return [check_ohno(k, args.shift or 0, params, tol)]
    if rel == "homomorphism":
        w1, w2 = HPoly.word(need(args.word, "--word")), HPoly.word(need(args.word2, "--word2"))
        lhs = eval_zeta_tilde(stuffle(w1, w2), params, tol)
        rhs = eval_zeta_tilde(w1, params, tol) * eval_zeta_tilde(w2, params, tol)
        return [make_report("homomorphism", {"w1": args.word, "w2": args.word2}, None, lhs, rhs, tol, params)]
    if rel == "duality":
        w = HPoly.word(need(args.word, "--word"))
        lhs, rhs = eval_zeta_tilde(w, params, tol), eval_zeta_tilde(tau(w), params, tol)
        return [make_report("duality", {"word": args.word}, None, lhs, rhs, tol, params)]
    bs = BiSeq.parse(need(args.biseq, "--biseq"))
    out = []
    for lam in lambdas:
        if rel == "fg":
            out.append(check_fg(bs, lam, params, tol))
        elif rel == "thm31":
            out.append(check_thm31(bs, args.case or thm31_case(bs), lam, params, tol, args.genfun))
        elif rel == "lemma33":
            out.append(check_lemma33(need(args.part, "--part"), bs, args.group, lam, params, tol))
        elif rel == "taylor":
            out.append(taylor_vs_ohno(bs, args.L, lam, params, tol))
        elif rel == "residue":
            partial, target, _ = residue_reconstruction(bs, lam, args.n_max, params)
            out.append(make_report("residue", {"biseq": str(bs), "n_max": args.n_max}, lam, partial, target, tol, params))
    return out


def _emit_reports(reports: list[RelationReport], as_json: bool, stream=None) -> None:
    stream = stream or sys.stdout
    for r in reports:
        print(json.dumps(r.to_json()) if as_json else r.summary(), file=stream)


def cmd_check(args: argparse.Namespace) -> int:
    params = _params(args)
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    try:
        lambdas = [parse_lambda(t) for t in args.lambdas] or [Fraction(1, 3)]
        if args.max_weight is not None:
            cfg = SweepConfig(
                max_weight=args.max_weight,
                lambdas=tuple(lambdas),
                tolerance=args.tol,
                eval=params,
                relations=(args.relation,),
                shifts=3 if args.shift is None else args.shift,
                taylor_L=args.L,
                taylor_tol=args.tol,
                residue_n_max=args.n_max,
                residue_tol=args.tol,
            )
            reports = list(iter_family(args.relation, cfg))
        else:
            reports = _single_checks(args, params, lambdas)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit_reports(reports, args.json)
    if not args.json:
        print(format_summary(summarize(reports)), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"malformed config: {exc}") from exc
    out_path = args.out or cfg.out
    try:
        reports = run_sweep(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            _emit_reports(reports, True, fh)
    else:
        _emit_reports(reports, True)
    print(format_summary(summarize(reports)), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


COMMANDS = {"stuffle": cmd_stuffle, "dual": cmd_dual, "eval": cmd_eval, "check": cmd_check, "sweep": cmd_sweep}


def _join_negative_lambdas(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--lambda -1/2`` as ``--lambda=-1/2``.

    argparse only treats plain negative numbers as values, so a negative
    fraction would otherwise be taken for an option.
    """
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok == "--lambda":
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and nxt[1:2].isdigit():
                out.append(f"--lambda={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_lambdas(sys.argv[1:] if argv is None else argv))
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mzvkit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
