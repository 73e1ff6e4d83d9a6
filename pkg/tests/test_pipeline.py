import json
from fractions import Fraction

import mpmath
from mpmath import workprec

from apery_words.constants import eval_const
from apery_words.evaluate import eval_wordsum
from apery_words.oracle import OracleConfig, direct_sum
from apery_words.pipeline import (
    combine_wordsums,
    compile_harmonic,
    compile_spec,
    trig_from_json_dict,
    trig_to_json_dict,
)
from apery_words.series import HarmonicSpec, Parity, parse_spec
from apery_words.trig import compile_spec_to_trig, predicted_weight_report

CFG = OracleConfig(cutoff=20_000, extrapolation_levels=4, precision_digits=16)


def test_pipeline_equivalence_on_corpus(corpus_results):
    worst = 0.0
    for entry in corpus_results:
        dev = abs(entry.compiled.real - entry.oracle_value)
        worst = max(worst, float(dev))
        assert dev < 1e-8, entry.spec
    assert worst < 1e-8


def test_compile_is_memoized():
    a = compile_spec(parse_spec("S[2n^2 > 0]"))
    b = compile_spec(parse_spec("S[ 2n^2 > 0 ]"))
    assert a is b


def test_deep_gamma_head_chain_vs_oracle():
    # weight-2 head over a depth-2 tail: the head recursion composed with the
    # full remainder chain, not just a single end block
    for text in ("S[2n-1^2 > 2n^1 > 2n+1^1 >= 0]", "S[2n-1^2 > 2n+1^1 >= 2n^1 > 0]",
                 "S2[2n-1^2 > 2n+1^1 >= 2n+1^1 >= 0]"):
        spec = parse_spec(text)
        compiled = eval_wordsum(compile_spec(spec), 140)
        want = direct_sum(spec, CFG).value
        assert abs(compiled.real - want) < 1e-8, text


def test_worked_identity_h2_over_np1():
    # sum a_n^2 H_n^(2)/(n+1) = 8*(low-odd/even (1,3)-chain) + 8*((2,2)-chain)
    with workprec(160):
        v1 = eval_wordsum(compile_spec(parse_spec("S2[2n-1^1 > 2n^2 > 0]")), 140).to_mpc()
        w2 = eval_wordsum(compile_spec(parse_spec("S2[2n-1^2 > 2n^2 > 0]")), 140).to_mpc()
        closed = eval_const("2*(16*G + pi**2/3 - 8*pi*log2)/pi", 140)
        assert abs(8 * (v1 + w2) - closed) < 1e-35


def test_worked_identity_zh11_over_np1():
    # sum a_n^2 zh_n(1,1)/(n+1) reduces to 8*(Y1 + Y2); check against a plain
    # partial sum (its tail is ~1.1e-4 at this cutoff, hence the loose bound)
    with workprec(160):
        y1 = eval_wordsum(compile_spec(parse_spec("S2[2n-1^1 > 2n^1 > 2n^1 > 0]")), 140).to_mpc()
        y2 = eval_wordsum(compile_spec(parse_spec("S2[2n-1^2 > 2n^1 > 2n^1 > 0]")), 140).to_mpc()
    a, h, zh11, partial = 1.0, 0.0, 0.0, 0.0
    for n in range(1, 300_000):
        zh11 += h / n
        h += 1.0 / n
        a *= (2 * n - 1) / (2 * n)
        partial += a * a * zh11 / (n + 1)
    assert 0 < float(8 * (y1 + y2).real) - partial < 3e-4


def test_worked_identity_h2n_over_odd():
    # sum a_n H_{2n}/(2n+1) = 2G, assembled from three compiled sums
    with workprec(160):
        a = eval_wordsum(compile_spec(parse_spec("S[2n+1^1 >= 2n^1 > 0]")), 140).to_mpc()
        b = eval_wordsum(compile_spec(parse_spec("S[2n+1^1 >= 2n+1^1 >= 0]")), 140).to_mpc()
        c = eval_wordsum(compile_spec(parse_spec("S[2n+1^2 >= 0]")), 140).to_mpc()
        assert abs((a + b - c) - 2 * mpmath.catalan) < 1e-35


def test_harmonic_compiled_vs_closed():
    h = HarmonicSpec((1,), (), Parity.ODD_LOW, 1, 2)
    value = eval_wordsum(compile_harmonic(h), 140).to_mpc()
    closed = eval_const("(8*log2 - 4)/pi", 140)
    assert abs(value - closed) < 1e-30


def test_combine_wordsums_scalars():
    a = compile_spec(parse_spec("S2[2n-1^2 > 0]"))
    b = compile_spec(parse_spec("S2[2n-1^1 > 0]"))
    total = combine_wordsums([(Fraction(2), a), (Fraction(-1), b)])
    with workprec(150):
        got = eval_wordsum(total, 140).to_mpc()
        want = 2 * eval_wordsum(a, 140).to_mpc() - eval_wordsum(b, 140).to_mpc()
        assert abs(got - want) < 1e-35


def test_weight_report():
    assert predicted_weight_report(parse_spec("S[2n^2 > 0]")) == {
        "weight": 2,
        "nu": 0,
        "max_word_weight": 2,
    }
    assert predicted_weight_report(parse_spec("S[2n-1^2 > 2n^1 > 0]")) == {
        "weight": 3,
        "nu": 1,
        "max_word_weight": 2,
    }
    rep = predicted_weight_report(parse_spec("S2[2n-1^2 > 2n^1 > 0]"))
    assert rep["eta"] == 2 and rep["iota"] == 2 and rep["max_word_weight"] == 2
    rep = predicted_weight_report(parse_spec("S2[2n-1^1 > 0]"))
    assert rep["iota"] == 1  # the depth-1 convention


def test_trig_json_roundtrip_bytes():
    expr = compile_spec_to_trig(parse_spec("S2[2n-1^2 > 2n^1 > 0]"))
    blob = json.dumps(trig_to_json_dict(expr), sort_keys=True)
    again = json.dumps(trig_to_json_dict(trig_from_json_dict(json.loads(blob))), sort_keys=True)
    assert blob == again


def test_compiled_words_match_weight_bound(corpus_results):
    # compiled word length never exceeds the series weight (+1 for squared)
    for entry in corpus_results:
        bound = entry.spec.weight + (1 if entry.spec.binom_power == 2 else 0)
        assert entry.words.max_weight() <= bound, entry.spec
