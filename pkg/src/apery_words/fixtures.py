"""Bundled reference values and the verifier that checks them three ways.

Each record carries a series (or harmonic-weighted) sum, optionally a closed
form over the constant catalog, and optionally the reference decimal it is
known to equal.  Verification evaluates the compiled path, the summation
oracle, and the closed form, and demands pairwise agreement: decimals within
10^(1-d) for d printed decimals, compiled-vs-closed within 10^-(digits-10),
anything against the oracle within max(decimal tolerance, 1e-8).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import mpmath
from mpmath import mpf, workprec

from .constants import eval_const
from .evaluate import ValueCache, eval_wordsum
from .oracle import OracleConfig, direct_harmonic_sum, direct_sum
from .pipeline import compile_harmonic, compile_spec
from .trig import predicted_weight_report
from .series import HarmonicSpec, Parity, SeriesSpec, parse_spec

_PARITY_BY_SYMBOL = {p.value: p for p in Parity}


@dataclass
class HarmonicPart:
    coef: Fraction
    spec: HarmonicSpec


@dataclass
class FixtureRecord:
    id: str
    series: SeriesSpec | None
    harmonic: list[HarmonicPart] | None
    closed_form: str | None
    printed_value: str | None
    anchor: str

    @property
    def abs_tolerance(self) -> float | None:
        if self.printed_value is None:
            return None
        decimals = len(self.printed_value.partition(".")[2])
        return 10.0 ** (1 - decimals)


def _parse_head(text: str) -> tuple[Parity, int]:
    symbol, _, exp = text.partition("^")
    return _PARITY_BY_SYMBOL[symbol], int(exp)


def _record_from_dict(data: dict) -> FixtureRecord:
    series = parse_spec(data["series"]) if data.get("series") else None
    harmonic = None
    if data.get("harmonic"):
        harmonic = []
        for part in data["harmonic"]:
            parity, exp = _parse_head(part["head"])
            harmonic.append(
                HarmonicPart(
                    Fraction(part.get("coef", "1")),
                    HarmonicSpec(
                        tuple(part.get("k", [])),
                        tuple(part.get("l", [])),
                        parity,
                        exp,
                        int(part.get("binom", 1)),
                    ),
                )
            )
    if series is None and harmonic is None:
        raise ValueError(f"fixture {data.get('id')} has neither a series nor harmonic parts")
    return FixtureRecord(
        id=data["id"],
        series=series,
        harmonic=harmonic,
        closed_form=data.get("closed_form"),
        printed_value=data.get("printed_value"),
        anchor=data.get("anchor", ""),
    )


def load_fixtures(path: str | None = None) -> list[FixtureRecord]:
    if path is None:
        text = resources.files("apery_words").joinpath("data/fixtures.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return [_record_from_dict(item) for item in json.loads(text)]


def _compiled_value(rec: FixtureRecord, precision_bits: int, cache: ValueCache | None):
    if rec.series is not None:
        return eval_wordsum(compile_spec(rec.series), precision_bits, cache).to_mpc()
    total = mpmath.mpc(0)
    for part in rec.harmonic:
        value = eval_wordsum(compile_harmonic(part.spec), precision_bits, cache).to_mpc()
        value *= mpf(part.coef.numerator) / part.coef.denominator
        total += value
    return total


def _oracle_value(rec: FixtureRecord, cfg: OracleConfig):
    if rec.series is not None:
        return direct_sum(rec.series, cfg).value
    total = mpf(0)
    for part in rec.harmonic:
        value = direct_harmonic_sum(part.spec, cfg).value
        total += value * mpf(part.coef.numerator) / part.coef.denominator
    return total


def verify_fixtures(
    path: str | None = None,
    precision_bits: int = 140,
    oracle_cfg: OracleConfig | None = None,
    cache: ValueCache | None = None,
) -> dict:
    """Check every record; returns the JSON-ready report (sorted by id)."""
    records = sorted(load_fixtures(path), key=lambda r: r.id)
    cfg = oracle_cfg or OracleConfig(cutoff=10_000, extrapolation_levels=4, precision_digits=16)
    digits = int(precision_bits * math.log10(2))
    closed_tol = mpf(10) ** (-(digits - 10))
    report_records = []
    failures = 0
    with workprec(precision_bits + 16):
        for rec in records:
            compiled = _compiled_value(rec, precision_bits, cache)
            oracle = _oracle_value(rec, cfg)
            entry: dict = {
                "id": rec.id,
                "anchor": rec.anchor,
                "compiled": mpmath.nstr(compiled.real, digits),
                "oracle": mpmath.nstr(oracle, 16),
            }
            if rec.series is not None:
                entry["weight_report"] = predicted_weight_report(rec.series)
            checks: list[bool] = []
            base_tol = mpf(rec.abs_tolerance) if rec.abs_tolerance is not None else mpf(0)
            oracle_tol = max(base_tol, mpf(1e-8))
            dev = abs(compiled.real - oracle)
            entry["dev_compiled_oracle"] = mpmath.nstr(dev, 3)
            checks.append(dev <= oracle_tol)
            if rec.closed_form is not None:
                closed = eval_const(rec.closed_form, precision_bits, cache)
                dev = abs(compiled - closed)
                entry["closed"] = mpmath.nstr(closed.real, digits)
                entry["dev_compiled_closed"] = mpmath.nstr(dev, 3)
                checks.append(dev <= closed_tol)
            if rec.printed_value is not None:
                printed = mpf(rec.printed_value)
                dev = abs(compiled.real - printed)
                entry["printed"] = rec.printed_value
                entry["dev_compiled_printed"] = mpmath.nstr(dev, 3)
                checks.append(dev <= base_tol)
            entry["status"] = "PASS" if all(checks) else "FAIL"
            failures += entry["status"] == "FAIL"
            report_records.append(entry)
    return {
        "precision_bits": precision_bits,
        "records": report_records,
        "total": len(report_records),
        "failed": failures,
        "passed": len(report_records) - failures,
    }


def render_report_table(report: dict) -> str:
    lines = [
        f"{'id':34s} {'status':6s} {'value':24s} {'vs oracle':10s} {'vs closed':10s} {'vs printed':10s}"
    ]
    for rec in report["records"]:
        lines.append(
            f"{rec['id']:34s} {rec['status']:6s} {rec['compiled'][:23]:24s} "
            f"{rec.get('dev_compiled_oracle', '-'):10s} "
            f"{rec.get('dev_compiled_closed', '-'):10s} "
            f"{rec.get('dev_compiled_printed', '-'):10s}"
        )
    lines.append(f"passed {report['passed']}/{report['total']}")
    return "\n".join(lines)
