"""Command-line surface: profile, synth, extract, separator, verify.

Exit codes are frozen for CI use: 0 success, 1 error (including a failed
verification), 2 partial output because a cap skipped some exact values,
3 no cycle witness exists (extract on an aperiodic input).  All output is
deterministic: identical invocations produce byte-identical bytes.

The RANKPROF_BUDGET environment variable overrides the default step budget;
the --budget flag overrides both.
"""

from __future__ import annotations

import argparse
import json
import sys

from .budget import Budget, default_budget
from .errors import NoCycleWitnessError, RankprofError
from .formulas import (
    distance_formula,
    exact_word_formula,
    horizon_classifier,
    length_formula,
    quantifier_rank,
    to_sexpr,
    tree_size,
)
from .profiles import (
    classify,
    exact_rank,
    exact_rank_via_defects,
    language_from_spec,
    report_to_text,
    separator_report,
    universal_upper_bound,
)
from .automata import extract_cycle_witness
from .words import DEFAULT_BALL_CAP, Alphabet, enumerate_ball

WITNESS_SCHEMA = "rankprof.witness/1"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2
EXIT_NO_WITNESS = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 means "partial" in our contract.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _alphabet_arg(text: str | None) -> Alphabet | None:
    return Alphabet(text) if text else None


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _budget_from(args) -> Budget:
    if getattr(args, "budget", None):
        return Budget(args.budget)
    return default_budget()


def cmd_profile(args) -> int:
    lang = language_from_spec(args.lang, _alphabet_arg(args.alphabet))
    report = classify(
        lang,
        max_n=args.max_n,
        min_n=args.min_n,
        exact_horizon=args.exact_horizon,
        q_max=args.q_max,
        ball_cap=args.ball_cap,
        budget=_budget_from(args),
    )
    _emit(report_to_text(report, args.format), args.out)
    return EXIT_PARTIAL if report.has_skipped_rows else EXIT_OK


def cmd_synth(args) -> int:
    if args.kind == "dist":
        if args.d is None:
            raise RankprofError("synth dist requires --d")
        phi = distance_formula(args.d)
    elif args.kind == "length":
        if args.m is None:
            raise RankprofError("synth length requires --m")
        phi = length_formula(args.m)
    elif args.kind == "exact-word":
        if args.word is None:
            raise RankprofError("synth exact-word requires --word")
        alphabet = _alphabet_arg(args.alphabet)
        if alphabet is None:
            symbols = sorted(set(args.word)) if args.word != "@eps" else []
            alphabet = Alphabet(symbols) if symbols else Alphabet("a")
        phi = exact_word_formula(alphabet.word(args.word))
    elif args.kind == "classifier":
        if args.lang is None or args.max_n is None:
            raise RankprofError("synth classifier requires --lang and --max-n")
        lang = language_from_spec(args.lang, _alphabet_arg(args.alphabet))
        members = [w for w in enumerate_ball(lang.alphabet, args.max_n, args.ball_cap)
                   if lang.accepts(w)]
        phi = horizon_classifier(members, args.max_n)
    else:
        raise RankprofError(f"unknown synth kind {args.kind!r}")
    text = to_sexpr(phi)
    trailer = f"; rank={quantifier_rank(phi)} size={tree_size(phi)}"
    _emit(text + "\n" + trailer + "\n", args.out)
    return EXIT_OK


def cmd_extract(args) -> int:
    lang = language_from_spec(args.lang, _alphabet_arg(args.alphabet))
    witness = extract_cycle_witness(lang.dfa, lang.monoid)
    doc = {"schema": WITNESS_SCHEMA, "language": lang.description}
    doc.update(witness.to_json())
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_separator(args) -> int:
    k = language_from_spec(args.k, _alphabet_arg(args.alphabet))
    h = language_from_spec(args.h, _alphabet_arg(args.alphabet))
    report = separator_report(k, h, max_n=args.max_n, min_n=args.min_n,
                              ball_cap=args.ball_cap, budget=_budget_from(args))
    if args.format == "json":
        _emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    else:
        _emit(report.to_csv(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    """Recompute every certified bound and cross-check the two exact routes."""
    lang = language_from_spec(args.lang, _alphabet_arg(args.alphabet))
    budget = _budget_from(args)
    report = classify(
        lang,
        max_n=args.max_n,
        min_n=args.min_n,
        exact_horizon=args.exact_horizon,
        q_max=args.q_max,
        ball_cap=args.ball_cap,
        budget=budget,
    )
    lines = ["n,exact,defect_route,lower,upper,ok"]
    all_ok = True
    skipped = False
    for row in report.rows:
        if row.exact is None:
            skipped = True
            lines.append(f"{row.n},skipped,,"
                         f"{'' if row.lower is None else row.lower},{row.upper},")
            continue
        second = exact_rank_via_defects(lang, row.n, args.ball_cap, budget)
        ok = (
            second == row.exact
            and row.exact <= row.upper
            and (row.lower is None or row.lower <= row.exact)
            and row.upper == universal_upper_bound(row.n)
        )
        all_ok &= ok
        lines.append(
            f"{row.n},{row.exact},{second},"
            f"{'' if row.lower is None else row.lower},{row.upper},{str(ok).lower()}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    if not all_ok:
        return EXIT_ERROR
    return EXIT_PARTIAL if skipped else EXIT_OK


def _add_common(p, lang_flag: bool = True):
    if lang_flag:
        p.add_argument("--lang", required=True,
                       help="language spec: regex:..., dfa:<path>, builtin:...")
    p.add_argument("--alphabet", help="explicit alphabet symbols, e.g. 'ab'")
    p.add_argument("--budget", type=int, help="step budget override")
    p.add_argument("--ball-cap", type=int, default=DEFAULT_BALL_CAP,
                   help="refuse enumerations beyond this many candidate words")
    p.add_argument("--out", help="write output to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rankprof",
                     description="Finite-horizon first-order rank profiles")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="per-horizon rank profile and dichotomy class")
    _add_common(p)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--min-n", type=int, default=2)
    p.add_argument("--exact-horizon", type=int,
                   help="compute exact values up to here (default 64 unary, 10 general)")
    p.add_argument("--q-max", type=int, help="cap for the global definability search")
    p.add_argument("--format", choices=("json", "csv", "plot"), default="json")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("synth", help="print a synthesized formula as an s-expression")
    p.add_argument("kind", choices=("dist", "length", "exact-word", "classifier"))
    p.add_argument("--d", type=int, help="distance (kind dist)")
    p.add_argument("--m", type=int, help="length (kind length)")
    p.add_argument("--word", help="word text or @eps (kind exact-word)")
    p.add_argument("--lang", help="language spec (kind classifier)")
    p.add_argument("--max-n", type=int, help="horizon (kind classifier)")
    p.add_argument("--alphabet", help="explicit alphabet symbols")
    p.add_argument("--ball-cap", type=int, default=DEFAULT_BALL_CAP)
    p.add_argument("--budget", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="extract a syntactic cycle witness")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("separator", help="separator rank table for two languages")
    p.add_argument("--k", required=True, help="first language spec")
    p.add_argument("--h", required=True, help="second language spec")
    p.add_argument("--alphabet")
    p.add_argument("--budget", type=int)
    p.add_argument("--ball-cap", type=int, default=DEFAULT_BALL_CAP)
    p.add_argument("--out")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--min-n", type=int, default=2)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_separator)

    p = sub.add_parser("verify", help="recompute and check every certified bound")
    _add_common(p)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--min-n", type=int, default=2)
    p.add_argument("--exact-horizon", type=int)
    p.add_argument("--q-max", type=int)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    try:
        return args.func(args)
    except NoCycleWitnessError as exc:
        print(f"rankprof: {exc}", file=sys.stderr)
        return EXIT_NO_WITNESS
    except (RankprofError, ValueError, OSError) as exc:
        print(f"rankprof: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
