"""Shared fixtures: the random spec corpus and its evaluated results.

The corpus is evaluated once per session (oracle + compiled at 140 bits) and
reused by the equivalence, reality, audit and acceptance tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import mpmath
import pytest

from apery_words.evaluate import BigComplex
from apery_words.oracle import OracleConfig, direct_sum

# reference constants in the tests are compared at up to ~1e-45; keep the
# ambient mpmath precision comfortably above that
mpmath.mp.dps = 60
from apery_words.pipeline import compile_spec
from apery_words.evaluate import eval_wordsum
from apery_words.series import IndexTerm, Parity, Relation, SeriesSpec, SpecValidationError
from apery_words.words import WordSum

CORPUS_BITS = 140
ORACLE_CFG = OracleConfig(cutoff=20_000, extrapolation_levels=4, precision_digits=16)


def random_spec(rng: random.Random, max_depth: int = 3, max_weight: int = 5) -> SeriesSpec:
    while True:
        depth = rng.randint(1, max_depth)
        exponents = []
        budget = max_weight
        for j in range(depth):
            hi = max(1, min(3, budget - (depth - 1 - j)))
            e = rng.randint(1, hi)
            exponents.append(e)
            budget -= e
        terms = tuple(
            IndexTerm(rng.choice(list(Parity)), e) for e in exponents
        )
        relations = tuple(rng.choice(list(Relation)) for _ in range(depth))
        try:
            return SeriesSpec(rng.choice((1, 2)), terms, relations)
        except SpecValidationError:
            continue


def build_corpus(count: int, seed: int = 20240817) -> list[SeriesSpec]:
    rng = random.Random(seed)
    seen: set[str] = set()
    out: list[SeriesSpec] = []
    from apery_words.series import render

    while len(out) < count:
        spec = random_spec(rng)
        key = render(spec)
        if key not in seen:
            seen.add(key)
            out.append(spec)
    return out


@dataclass
class CorpusEntry:
    spec: SeriesSpec
    words: WordSum
    compiled: BigComplex
    oracle_value: mpmath.mpf
    oracle_error: mpmath.mpf


@pytest.fixture(scope="session")
def corpus() -> list[SeriesSpec]:
    return build_corpus(100)


@pytest.fixture(scope="session")
def corpus_results(corpus) -> list[CorpusEntry]:
    out = []
    for spec in corpus:
        words = compile_spec(spec)
        compiled = eval_wordsum(words, CORPUS_BITS)
        res = direct_sum(spec, ORACLE_CFG)
        out.append(CorpusEntry(spec, words, compiled, res.value, res.error_estimate))
    return out


@pytest.fixture(scope="session")
def oracle_cfg() -> OracleConfig:
    return ORACLE_CFG
