"""Apery-type central-binomial series, compiled to level-4 iterated-integral
words and evaluated to arbitrary precision, with a direct-summation oracle."""

from .oracle import OracleConfig, OracleResult, central_ratio, direct_sum
from .pipeline import compile_spec, evaluate_compiled, evaluate_direct
from .series import HarmonicSpec, SeriesSpec, expand_harmonic, parse_spec, render

__all__ = [
    "HarmonicSpec",
    "OracleConfig",
    "OracleResult",
    "SeriesSpec",
    "central_ratio",
    "compile_spec",
    "direct_sum",
    "evaluate_compiled",
    "evaluate_direct",
    "expand_harmonic",
    "parse_spec",
    "render",
]
