"""Command-line interface.

Every command prints line-delimited JSON records with the fixed key order
``n, base, kind, flags, extra`` (big integers as decimal strings), or a
plain table with ``--format table``.

Exit codes: 0 ok, 2 domain error, 3 factorization budget exhausted,
4 formula/brute-force mismatch, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Sequence

from . import config
from .census import CensusRecord, run_census
from .cyclotomic import Verdict, midy_generator
from .errors import DomainError, FactorizationBudgetExceeded, MidyError
from .midy import count_midy_bases, count_midy_bases_brute, midy_set
from .pseudo import (
    classify,
    count_bases_brute,
    count_pp_bases,
    count_qpp_bases,
    count_spp_bases,
)

EXIT_OK, EXIT_DOMAIN, EXIT_BUDGET, EXIT_MISMATCH, EXIT_IO = 0, 2, 3, 4, 5

log = logging.getLogger("qpseudo")


def _natural(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a decimal integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"negative value: {text!r}")
    return value


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        value = _natural(text)
        return value, value
    return _natural(lo), _natural(hi)


def _q_list(values: list[str] | None) -> list[int] | None:
    if not values:
        return None
    return [_natural(part) for v in values for part in v.split(",") if part]


def _emit(records: list[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "jsonl":
        for rec in records:
            out.write(json.dumps(rec) + "\n")
        return
    for rec in records:
        cells = [rec["n"], rec["base"] if rec["base"] is not None else "-", rec["kind"]]
        cells += [k for k, v in rec["flags"].items() if v is True]
        cells += [f"{k}={v}" for k, v in rec["extra"].items()]
        out.write("  ".join(str(c) for c in cells) + "\n")


def _record(n, base, kind: str, flags: dict, extra: dict) -> dict:
    return {
        "n": str(n),
        "base": None if base is None else str(base),
        "kind": kind,
        "flags": flags,
        "extra": extra,
    }


def cmd_classify(args: argparse.Namespace) -> int:
    c = classify(args.n, args.base, _q_list(args.q))
    flags = {
        "is_probable_prime": c.is_probable_prime,
        "fermat_psp": c.fermat_psp,
        "strong_psp": c.strong_psp,
        "midy_number": c.midy_number,
        "carmichael": c.carmichael,
    }
    extra = {"factorization": "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in c.factorization)}
    for r in c.q_results:
        flags[f"q_probable_prime({r.q})"] = r.q_probable_prime
        if r.witness_i is not None:
            extra[f"witness_i({r.q})"] = str(r.witness_i)
    _emit([_record(c.n, c.base, "classification", flags, extra)], args.format)
    return EXIT_OK


def cmd_midy_set(args: argparse.Namespace) -> int:
    ms = midy_set(args.n, args.base)
    members = " ".join(str(d) for d in ms.members)
    if args.format == "table":
        print(members)
    else:
        _emit([_record(ms.modulus, ms.base, "midy_set", {}, {"order": str(ms.order), "members": members})], "jsonl")
    return EXIT_OK


def cmd_count_bases(args: argparse.Namespace) -> int:
    n, kind = args.n, args.kind
    if kind == "qpp" and args.q is None:
        raise DomainError("--kind qpp requires --q")
    q = _q_list(args.q)[0] if args.q else None
    if kind == "pp":
        formula = count_pp_bases(n)
    elif kind == "spp":
        formula = count_spp_bases(n)
    elif kind == "qpp":
        formula = count_qpp_bases(n, q)
    else:
        formula = count_midy_bases(n)
    extra = {"formula": str(formula)}
    if kind == "qpp":
        extra["q"] = str(q)
    flags: dict[str, bool] = {}
    status = EXIT_OK
    if args.verify:
        if kind == "midy":
            brute = count_midy_bases_brute(n)
            extra["brute_order_equality"] = str(brute.by_order_equality)
            extra["brute_full_definition"] = str(brute.by_full_definition)
            match = formula == brute.by_order_equality == brute.by_full_definition
        else:
            predicate = {"pp": "fermat", "spp": "strong", "qpp": "q_probable"}[kind]
            brute = count_bases_brute(n, predicate, q)
            extra["brute"] = str(brute)
            match = formula == brute
        extra["verdict"] = "MATCH" if match else "MISMATCH"
        flags["match"] = match
        if not match:
            status = EXIT_MISMATCH
    _emit([_record(n, None, f"count_{kind}", flags, extra)], args.format)
    return status


def cmd_generate(args: argparse.Namespace) -> int:
    n_lo, n_hi = args.range
    b_lo, b_hi = args.base
    for n in range(n_lo, n_hi + 1):
        records = []
        for b in range(b_lo, b_hi + 1):
            try:
                g = midy_generator(n, b)
            except MidyError as exc:
                records.append(_record(n, b, "error", {}, {"error": str(exc)}))
                continue
            flags = {"prime": g.verdict is Verdict.PRIME, "midy_number": g.verdict is Verdict.MIDY_NUMBER}
            records.append(_record(n, b, "generator", flags, {"value": str(g.value), "verdict": g.verdict.value}))
        _emit(records, args.format)
    return EXIT_OK


def cmd_census(args: argparse.Namespace) -> int:
    lo, hi = args.range
    settings = config.Settings()
    result = run_census(
        lo,
        hi,
        args.base,
        args.kind,
        args.out,
        q=_q_list(args.q)[0] if args.q else None,
        jobs=args.jobs or settings.jobs,
        checkpoint_path=args.checkpoint,
        chunk_size=args.chunk_size or settings.chunk_size,
        checkpoint_every=args.checkpoint_every or settings.checkpoint_every,
        max_chunks=args.max_chunks,
    )
    log.info("census wrote %d records, cursor %d, complete=%s", result.hits, result.cursor, result.complete)
    if args.format == "table":
        with open(args.out) as fh:
            for line in fh:
                rec = CensusRecord.from_json(line)
                _emit([_record(rec.n, rec.base, rec.kind, rec.flags, rec.extra)], "table")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpseudo", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("jsonl", "table"), default="jsonl")
    common.add_argument("--oracle-bound", type=_natural, help="largest N for exhaustive oracles")
    common.add_argument("--factor-budget", type=_natural, help="rho iteration cap per factorization")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="all pseudoprimality flags of N to a base")
    p.add_argument("n", type=_natural)
    p.add_argument("--base", type=_natural, required=True)
    p.add_argument("--q", action="append", help="prime(s) for the q-probable-prime test; repeatable or comma-separated")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("midy-set", parents=[common], help="divisors d of |b|_N with Midy's property")
    p.add_argument("n", type=_natural)
    p.add_argument("--base", type=_natural, required=True)
    p.set_defaults(func=cmd_midy_set)

    p = sub.add_parser("count-bases", parents=[common], help="closed-form base counts, optionally brute-verified")
    p.add_argument("n", type=_natural)
    p.add_argument("--kind", choices=("pp", "spp", "qpp", "midy"), required=True)
    p.add_argument("--q", action="append")
    p.add_argument("--verify", action="store_true", help="compare against exhaustive enumeration")
    p.set_defaults(func=cmd_count_bases)

    p = sub.add_parser("generate", parents=[common], help="Phi_n(b)/gcd(n, Phi_n(b)) over ranges of n and b")
    p.add_argument("--range", type=_range, required=True, help="n range LO..HI")
    p.add_argument("--base", type=_range, required=True, help="base range LO..HI or a single base")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("census", parents=[common], help="scan odd n in a range for pseudoprimes")
    p.add_argument("--range", type=_range, required=True, help="LO..HI, inclusive")
    p.add_argument("--base", type=_natural, required=True)
    p.add_argument("--kind", choices=("overpseudoprime", "fermat_psp", "strong_psp", "q_psp"), required=True)
    p.add_argument("--q", action="append", help="prime q for --kind q_psp")
    p.add_argument("--jobs", type=_natural, help="worker processes (default: logical cores)")
    p.add_argument("--out", required=True)
    p.add_argument("--checkpoint", help="checkpoint file; resumed from when present")
    p.add_argument("--chunk-size", type=_natural, help="odd candidates per work unit")
    p.add_argument("--checkpoint-every", type=_natural, help="chunks between checkpoints")
    p.add_argument("--max-chunks", type=_natural, help="stop after this many chunks (resume later)")
    p.set_defaults(func=cmd_census)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    # flags override MIDY_* variables; workers inherit the environment
    if args.oracle_bound:
        os.environ["MIDY_ORACLE_BOUND"] = str(args.oracle_bound)
    if args.factor_budget:
        os.environ["MIDY_FACTOR_BUDGET"] = str(args.factor_budget)
    try:
        return args.func(args)
    except FactorizationBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
