"""Command-line interface.

Subcommands: eval, compile, verify, constants, harmonic.  All values are
printed as decimal text.  The word-value cache lives at --cache-path
(./cmzv-cache.jsonl by default); the CMZV_CACHE environment variable
overrides the flag.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import mpmath
from mpmath import workprec

from . import fixtures as fixtures_mod
from .constants import CATALOG_DESCRIPTIONS, constant_value
from .evaluate import ValueCache, eval_wordsum
from .oracle import OracleConfig, direct_harmonic_sum
from .pipeline import (
    compile_harmonic,
    compile_spec,
    evaluate_direct,
    trig_to_json_dict,
)
from .series import (
    HarmonicSpec,
    Parity,
    SpecSyntaxError,
    SpecValidationError,
    canonical_key,
    parse_spec,
    render,
)
from .trig import CompileError, compile_spec_to_trig, predicted_weight_report


def _bits(digits: int) -> int:
    return max(64, int(math.ceil(digits * math.log2(10))) + 16)


def _cache(args) -> ValueCache:
    path = os.environ.get("CMZV_CACHE", args.cache_path)
    return ValueCache(path)


def _oracle_cfg(args) -> OracleConfig:
    return OracleConfig(
        cutoff=args.cutoff,
        extrapolation_levels=args.levels,
        precision_digits=max(15, min(args.digits, 25)),
    )


def _print_value(label: str, value, digits: int) -> str:
    return mpmath.nstr(value, digits, strip_zeros=False)


def cmd_eval(args) -> int:
    spec = parse_spec(args.spec)
    digits = args.digits
    out: dict = {"spec": render(spec), "key": canonical_key(spec), "method": args.method}
    cache = _cache(args)
    with workprec(_bits(digits) + 16):
        if args.method in ("compiled", "both"):
            value = eval_wordsum(compile_spec(spec), _bits(digits), cache)
            out["compiled"] = mpmath.nstr(value.real, digits)
            out["compiled_imag"] = mpmath.nstr(value.imag, 5)
            out["max_word_weight"] = compile_spec(spec).max_weight()
            out["weight_report"] = predicted_weight_report(spec)
        if args.method in ("direct", "both"):
            res = evaluate_direct(spec, _oracle_cfg(args))
            out["direct"] = mpmath.nstr(res.value, digits)
            out["direct_error_estimate"] = mpmath.nstr(res.error_estimate, 3)
            out["terms_used"] = res.terms_used
        if args.method == "both":
            dev = abs(mpmath.mpf(out["compiled"]) - mpmath.mpf(out["direct"]))
            out["deviation"] = mpmath.nstr(dev, 3)
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        for key in ("compiled", "direct", "deviation", "direct_error_estimate"):
            if key in out:
                print(f"{key:24s} {out[key]}")
        if "weight_report" in out:
            print(f"{'weight report':24s} {out['weight_report']}")
    return 0


def cmd_compile(args) -> int:
    spec = parse_spec(args.spec)
    if args.ir == "trig":
        data = trig_to_json_dict(compile_spec_to_trig(spec))
    else:
        data = compile_spec(spec).to_json_dict()
    print(json.dumps(data, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    cache = _cache(args)
    report = fixtures_mod.verify_fixtures(
        args.fixtures, _bits(args.digits), oracle_cfg=_oracle_cfg(args), cache=cache
    )
    print(fixtures_mod.render_report_table(report))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report, fh, sort_keys=True, indent=1)
    return 1 if report["failed"] else 0


def cmd_constants(args) -> int:
    cache = _cache(args)
    bits = _bits(args.digits)
    for name, description in CATALOG_DESCRIPTIONS.items():
        value = constant_value(name, bits, cache)
        print(f"{name:10s} {mpmath.nstr(value, args.digits):<{args.digits + 6}s} {description}")
    return 0


def _parse_weight_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(part) for part in text.split(","))


def cmd_harmonic(args) -> int:
    parity_by_symbol = {p.value: p for p in Parity}
    symbol, _, exp = args.head.partition("^")
    h = HarmonicSpec(
        _parse_weight_list(args.k),
        _parse_weight_list(args.l),
        parity_by_symbol[symbol],
        int(exp or 1),
        args.binom,
    )
    digits = args.digits
    cache = _cache(args)
    out: dict = {"k": list(h.k_vec), "l": list(h.l_vec), "head": args.head, "binom": h.binom_power}
    with workprec(_bits(digits) + 16):
        if args.method in ("compiled", "both"):
            value = eval_wordsum(compile_harmonic(h), _bits(digits), cache)
            out["compiled"] = mpmath.nstr(value.real, digits)
        if args.method in ("direct", "both"):
            res = direct_harmonic_sum(h, _oracle_cfg(args))
            out["direct"] = mpmath.nstr(res.value, digits)
        if args.method == "both":
            dev = abs(mpmath.mpf(out["compiled"]) - mpmath.mpf(out["direct"]))
            out["deviation"] = mpmath.nstr(dev, 3)
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        for key in ("compiled", "direct", "deviation"):
            if key in out:
                print(f"{key:12s} {out[key]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apery-words",
        description="Compile Apery-type central-binomial series to level-4 "
        "iterated-integral words and verify them against direct summation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, digits=30):
        p.add_argument("--digits", type=int, default=digits)
        p.add_argument("--cutoff", type=int, default=20_000, help="oracle outer-index cutoff")
        p.add_argument("--levels", type=int, default=4, help="oracle extrapolation levels")
        p.add_argument("--cache-path", default="./cmzv-cache.jsonl",
                       help="word-value cache file (env CMZV_CACHE overrides)")

    p = sub.add_parser("eval", help="evaluate one series spec")
    p.add_argument("spec")
    p.add_argument("--method", choices=("direct", "compiled", "both"), default="both")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compile", help="dump the intermediate representation")
    p.add_argument("spec")
    p.add_argument("--ir", choices=("trig", "words"), default="words")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", help="run the bundled reference-value suite")
    p.add_argument("--fixtures", default=None, help="fixtures JSON path (default: bundled set)")
    p.add_argument("--json", default=None, help="write the JSON report here")
    common(p, digits=40)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("constants", help="print the constant catalog")
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("harmonic", help="evaluate a harmonic-weighted sum")
    p.add_argument("--k", default="", help="comma-separated harmonic weights (even chain)")
    p.add_argument("--l", default="", help="comma-separated odd-harmonic weights")
    p.add_argument("--head", required=True, help="head index and exponent, e.g. 2n-1^2")
    p.add_argument("--binom", type=int, choices=(1, 2), default=1)
    p.add_argument("--method", choices=("direct", "compiled", "both"), default="both")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_harmonic)
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecSyntaxError, SpecValidationError, CompileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
