from fractions import Fraction

import pytest

from apery_words.oracle import OracleConfig, direct_harmonic_sum, direct_sum
from apery_words.series import (
    HarmonicSpec,
    IndexTerm,
    Parity,
    Relation,
    SeriesSpec,
    SpecSyntaxError,
    SpecValidationError,
    canonical_key,
    canonicalize,
    enumerate_specs,
    expand_harmonic,
    parse_spec,
    render,
)

FAST_CFG = OracleConfig(cutoff=5_000, extrapolation_levels=4, precision_digits=15)


def test_parse_minimal():
    spec = parse_spec("S[2n^1 > 0]")
    assert spec.binom_power == 1
    assert spec.terms == (IndexTerm(Parity.EVEN, 1),)
    assert spec.relations == (Relation.STRICT,)


def test_parse_mixed():
    spec = parse_spec("S[2n+1^1 >= 2n^1 > 0]")
    assert spec.terms == (IndexTerm(Parity.ODD_HIGH, 1), IndexTerm(Parity.EVEN, 1))
    assert spec.relations == (Relation.WEAK, Relation.STRICT)


def test_parse_squared():
    spec = parse_spec("S2[2n-1^2 > 2n-1^1 > 0]")
    assert spec.binom_power == 2
    assert spec.terms == (IndexTerm(Parity.ODD_LOW, 2), IndexTerm(Parity.ODD_LOW, 1))


def test_parse_suffixes():
    spec = parse_spec("S[2n^2 > 0]@tail=3@x=0.5")
    assert spec.tail_bound == 3
    assert spec.argument == Fraction(1, 2)


def test_parse_rejects_weak_even_bottom():
    with pytest.raises(SpecValidationError):
        parse_spec("S[2n^1 >= 0]")


def test_parse_rejects_reachable_zero_denominator():
    # all-weak chain lets the even index hit n = 0
    with pytest.raises(SpecValidationError):
        parse_spec("S[2n^1 >= 2n+1^1 >= 0]")
    # a strict step below the even index makes it fine
    parse_spec("S[2n^1 > 2n+1^1 >= 0]")


def test_parse_syntax_errors_carry_position():
    with pytest.raises(SpecSyntaxError):
        parse_spec("S[2n > 0]")
    with pytest.raises(SpecSyntaxError):
        parse_spec("T[2n^1 > 0]")
    with pytest.raises(SpecSyntaxError):
        parse_spec("S[2n^1 >")


def test_roundtrip_enumerated():
    for spec in enumerate_specs(500):
        assert parse_spec(render(spec)) == spec


def test_roundtrip_corpus(corpus):
    for spec in corpus:
        assert parse_spec(render(spec)) == spec


def test_canonicalize_idempotent():
    spec = parse_spec("S[2n-1^2 > 2n^1 > 0]")
    assert canonicalize(spec) == canonicalize(canonicalize(spec))


def test_equal_keys_for_spellings():
    assert canonical_key(parse_spec("S[2n^1>0]")) == canonical_key(parse_spec("S[ 2n^1 > 0 ]"))
    assert canonical_key(parse_spec("S[2n^1 > 0]@x=0.50")) == canonical_key(
        parse_spec("S[2n^1 > 0]@x=1/2")
    )


def test_distinct_keys_on_enumeration():
    specs = enumerate_specs(10_000)
    keys = {canonical_key(s) for s in specs}
    assert len(keys) == len(specs)


def test_expand_harmonic_no_weights():
    h = HarmonicSpec((), (), Parity.EVEN, 2, 1)
    assert expand_harmonic(h) == [(Fraction(4), parse_spec("S[2n^2 > 0]"))]


def test_expand_harmonic_single_zeta_weight():
    h = HarmonicSpec((1,), (), Parity.EVEN, 2, 1)
    [(coef, spec)] = expand_harmonic(h)
    assert coef == 8
    assert spec == parse_spec("S[2n^2 >= 2n^1 > 0]")


@pytest.mark.parametrize(
    "h",
    [
        HarmonicSpec((1,), (), Parity.EVEN, 2, 1),
        HarmonicSpec((2,), (), Parity.EVEN, 3, 2),
        HarmonicSpec((1,), (1,), Parity.ODD_HIGH, 2, 1),
        HarmonicSpec((), (2,), Parity.ODD_LOW, 1, 2),
        HarmonicSpec((1, 1), (), Parity.ODD_LOW, 2, 2),
    ],
)
def test_expand_harmonic_matches_direct_sum(h):
    direct = direct_harmonic_sum(h, FAST_CFG).value
    expanded = sum(
        float(coef) * float(direct_sum(spec, FAST_CFG).value)
        for coef, spec in expand_harmonic(h)
    )
    assert abs(float(direct) - expanded) < 1e-8


def test_harmonic_validation():
    with pytest.raises(SpecValidationError):
        HarmonicSpec((1,), (), Parity.EVEN, 1, 1)  # head exponent too small
    with pytest.raises(SpecValidationError):
        HarmonicSpec((0,), (), Parity.EVEN, 2, 1)
    HarmonicSpec((), (), Parity.ODD_LOW, 1, 2)  # squared heads allow exponent 1


def test_spec_invariants():
    with pytest.raises(SpecValidationError):
        SeriesSpec(3, (IndexTerm(Parity.EVEN, 1),), (Relation.STRICT,))
    with pytest.raises(SpecValidationError):
        SeriesSpec(1, (), ())
    with pytest.raises(SpecValidationError):
        SeriesSpec(1, (IndexTerm(Parity.EVEN, 1),), (Relation.STRICT,), argument=Fraction(2))
