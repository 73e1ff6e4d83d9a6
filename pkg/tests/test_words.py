import json
from fractions import Fraction

import mpmath
import pytest

from apery_words.evaluate import eval_wordsum
from apery_words.gauss import GaussRat
from apery_words.pipeline import compile_spec
from apery_words.series import parse_spec
from apery_words.trig import CompileError, TrigExpr, TrigForm
from apery_words.words import (
    W0,
    X1,
    XI,
    XM1,
    XMI,
    Atom,
    NonconvergentWordError,
    RealityClass,
    WordSum,
    atom_from_name,
    atom_name,
    cov,
    deconcatenations,
    is_convergent,
    reality_class,
)


def _expr(words, constant=Fraction(0), pow2=0):
    e = TrigExpr(two_over_pi_power=pow2)
    for word, coef in words.items():
        e.add_term(word, Fraction(coef))
    e.constant = Fraction(constant)
    return e


def test_cov_dt():
    ws = cov(_expr({(TrigForm.DT,): 1}))
    assert ws.terms == {(XMI,): GaussRat(0, -1), (XI,): GaussRat(0, 1)}
    value = eval_wordsum(ws, 140).to_mpc()
    assert abs(value - mpmath.pi / 2) < 1e-40


def test_cov_even_weight_one():
    ws = cov(_expr({(TrigForm.CSC,): 1, (TrigForm.COT,): -1}))
    assert ws.terms == {
        (XM1,): GaussRat(-2),
        (XMI,): GaussRat(1),
        (XI,): GaussRat(1),
    }
    assert abs(eval_wordsum(ws, 140).to_mpc() - mpmath.log(2)) < 1e-40


def test_cov_scalar_only():
    ws = cov(_expr({}, constant=Fraction(3, 7)))
    assert ws.terms == {} and ws.scalar == GaussRat(Fraction(3, 7))
    assert abs(eval_wordsum(ws, 140).to_mpc() - mpmath.mpf(3) / 7) < 1e-40


def test_cov_linearity():
    from apery_words.trig import compile_spec_to_trig

    e1 = compile_spec_to_trig(parse_spec("S[2n^1 > 2n+1^1 >= 0]"))
    e2 = compile_spec_to_trig(parse_spec("S[2n+1^1 >= 2n^1 > 0]"))
    a, b = Fraction(3), Fraction(-5, 2)
    combined = TrigExpr()
    for w, c in e1.terms.items():
        combined.add_term(w, a * c)
    for w, c in e2.terms.items():
        combined.add_term(w, b * c)
    lhs = cov(combined)
    rhs: dict = {}
    for coef, e in ((a, e1), (b, e2)):
        for w, c in cov(e).terms.items():
            rhs[w] = rhs.get(w, GaussRat(0)) + c * coef
    rhs = {w: c for w, c in rhs.items() if c}
    assert lhs.terms == rhs


def test_cov_rejects_unpeeled_sin():
    with pytest.raises(CompileError):
        cov(_expr({(TrigForm.SIN, TrigForm.DT): 1}))


def test_deconcatenations():
    assert deconcatenations(()) == [((), ())]
    assert deconcatenations((XM1,)) == [((), (XM1,)), ((XM1,), ())]
    word = (W0, XM1, XI)
    splits = deconcatenations(word)
    assert len(splits) == 4
    for u, v in splits:
        assert u + v == word


def test_convergence_rule():
    assert is_convergent(())
    assert is_convergent((XM1, X1))
    assert not is_convergent((X1, XM1))
    assert not is_convergent((XM1, W0))


def test_reality_class():
    assert reality_class(parse_spec("S[2n^2 > 0]")) == RealityClass.REAL
    assert reality_class(parse_spec("S[2n+1^2 >= 0]")) == RealityClass.IMAGINARY_PAIRED
    with pytest.raises(CompileError):
        reality_class(parse_spec("S[2n-1^2 > 0]"))


def test_reality_coefficient_audit(corpus_results):
    from apery_words.series import Parity
    from apery_words.trig import rewrite_to_block_shape

    for entry in corpus_results:
        spec = entry.spec
        if spec.binom_power != 1:
            continue
        items = rewrite_to_block_shape(spec)
        parities = {
            item.terms[0].parity for _, item in items if item is not None
        }
        if parities == {Parity.EVEN}:
            assert all(c.is_real() for c in entry.words.terms.values()), spec
        if parities == {Parity.ODD_HIGH}:
            assert all(c.is_imaginary() for c in entry.words.terms.values()), spec


def test_word_count_bound(corpus_results):
    for entry in corpus_results:
        w = entry.spec.weight + (1 if entry.spec.binom_power == 2 else 0)
        assert len(entry.words.terms) <= 4**w, entry.spec


def test_all_corpus_words_convergent(corpus_results):
    for entry in corpus_results:
        for word in entry.words.terms:
            assert is_convergent(word)


def test_atom_names_roundtrip():
    atoms = [
        W0,
        X1,
        XM1,
        XI,
        XMI,
        Atom(GaussRat(2)),
        Atom(GaussRat(1, -1)),
        Atom(GaussRat(Fraction(-3, 2), Fraction(1, 4))),
        Atom(GaussRat(2), -1),
    ]
    for atom in atoms:
        assert atom_from_name(atom_name(atom)) == atom
    assert atom_name(W0) == "w0" and atom_name(XMI) == "x-i"


def test_wordsum_json_roundtrip_bytes():
    ws = compile_spec(parse_spec("S2[2n-1^2 > 2n^1 > 0]"))
    blob = json.dumps(ws.to_json_dict(), sort_keys=True)
    again = json.dumps(WordSum.from_json_dict(json.loads(blob)).to_json_dict(), sort_keys=True)
    assert blob == again


def test_nonconvergent_word_error():
    # a lone tan form would put dt/t at the 0-end after the substitution
    with pytest.raises(NonconvergentWordError):
        cov(_expr({(TrigForm.TAN,): 1}))
