"""Rewrite a series spec into words of trigonometric 1-forms on (0, pi/2).

The pipeline stages, in order:

  convert_relations      -- inclusion/exclusion until each relation is weak
                            exactly after a 2n+1 index (the shape the block
                            construction needs); coinciding indices merge, and
                            mixed-parity merges split by partial fractions.
  eliminate_inner_oddlow -- index shifts 2n-1 -> 2m+1 so that a 2n-1 index
                            survives only in the leading position.
  reduce_leading_gamma   -- a weight-1 leading 2n-1 factor drops outright; a
                            higher weight becomes a GammaHead marker.
  compile_blocks         -- emits the word combination: each index contributes
                            a block of 1-forms, a block's trailing sec/tan
                            multiplies the head form of the next block, and a
                            GammaHead unrolls through the weight-lowering
                            recursion.  Squared-binomial sums get a Wallis
                            prefix form and a 2/pi scale; their sin/cos
                            prefixes are peeled into the eight-form alphabet
                            plus exact constants.

Everything here is exact: words map to Fraction coefficients, constants are a
rational plus a rational multiple of pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .series import IndexTerm, Parity, Relation, SeriesSpec


class TrigForm(Enum):
    DT = "dt"
    COT = "cot"
    TAN = "tan"
    CSC = "csc"
    SEC = "sec"
    SECCSC = "seccsc"
    SIN = "sin"
    COS = "cos"


TrigWord = tuple[TrigForm, ...]


@dataclass
class TrigExpr:
    """Rational combination of trig words, a peeled constant, a 2/pi marker.

    Value = (2/pi)^two_over_pi_power * (sum of word integrals over (0, pi/2)
    + constant + constant_pi * pi).
    """

    terms: dict[TrigWord, Fraction] = field(default_factory=dict)
    constant: Fraction = Fraction(0)
    constant_pi: Fraction = Fraction(0)
    two_over_pi_power: int = 0

    def add_term(self, word: TrigWord, coef: Fraction) -> None:
        new = self.terms.get(word, Fraction(0)) + coef
        if new:
            self.terms[word] = new
        else:
            self.terms.pop(word, None)

    def scaled(self, coef: Fraction) -> "TrigExpr":
        return TrigExpr(
            {w: c * coef for w, c in self.terms.items()},
            self.constant * coef,
            self.constant_pi * coef,
            self.two_over_pi_power,
        )

    def __iadd__(self, other: "TrigExpr") -> "TrigExpr":
        if other.two_over_pi_power != self.two_over_pi_power:
            raise CompileError("cannot combine expressions with different 2/pi scales")
        for w, c in other.terms.items():
            self.add_term(w, c)
        self.constant += other.constant
        self.constant_pi += other.constant_pi
        return self


class CompileError(ValueError):
    """A spec reached the compiler in a shape it does not support."""


@dataclass(frozen=True)
class GammaHead:
    """Leading 2n-1 factor of weight >= 2, to be unrolled by compile_blocks."""

    weight: int
    tail: SeriesSpec | None


Combination = list[tuple[Fraction, SeriesSpec | None]]


def pf_decompose(a: int, b: int) -> list[tuple[Fraction, str, int]]:
    """Partial fractions of 1/(x^a (x-1)^b).

    Returns (coefficient, pole, exponent) triples with pole "x-1" or "x":
    1/(x^a (x-1)^b) = sum_j C(-a, b-j)/(x-1)^j
                    + sum_j (-1)^(a+b-j) C(-b, a-j)/x^j.
    """
    if a < 1 or b < 1:
        raise ValueError("pf_decompose wants a, b >= 1")
    out: list[tuple[Fraction, str, int]] = []
    for j in range(1, b + 1):
        out.append((_gen_binom(-a, b - j), "x-1", j))
    for j in range(1, a + 1):
        sign = -1 if (a + b - j) % 2 else 1
        out.append((sign * _gen_binom(-b, a - j), "x", j))
    return out


def _gen_binom(n: int, k: int) -> Fraction:
    # C(-m, k) = (-1)^k C(m+k-1, k)
    if k == 0:
        return Fraction(1)
    sign = -1 if k % 2 else 1
    return Fraction(sign * math.comb(-n + k - 1, k))


def _merge_factors(p1: Parity, e1: int, p2: Parity, e2: int) -> list[tuple[Fraction, IndexTerm]]:
    """Expand 1/(l1(n)^e1 * l2(n)^e2) into single-parity terms at the same n."""
    if p1 is p2:
        return [(Fraction(1), IndexTerm(p1, e1 + e2))]
    pair = {p1: e1, p2: e2}
    if Parity.EVEN in pair and Parity.ODD_HIGH in pair:
        # x = 2n+1: 1/((x-1)^even * x^odd); x-1 -> 2n, x -> 2n+1
        a, b = pair[Parity.ODD_HIGH], pair[Parity.EVEN]
        pole_map = {"x-1": Parity.EVEN, "x": Parity.ODD_HIGH}
        scale = lambda j: Fraction(1)
    elif Parity.EVEN in pair and Parity.ODD_LOW in pair:
        # x = 2n: 1/(x^even * (x-1)^oddlow)
        a, b = pair[Parity.EVEN], pair[Parity.ODD_LOW]
        pole_map = {"x-1": Parity.ODD_LOW, "x": Parity.EVEN}
        scale = lambda j: Fraction(1)
    else:
        # v = n + 1/2: 1/((2n+1)^a (2n-1)^b) = 2^(-a-b) / (v^a (v-1)^b),
        # then 1/v^j = 2^j/(2n+1)^j and 1/(v-1)^j = 2^j/(2n-1)^j.
        a, b = pair[Parity.ODD_HIGH], pair[Parity.ODD_LOW]
        pole_map = {"x-1": Parity.ODD_LOW, "x": Parity.ODD_HIGH}
        scale = lambda j: Fraction(2) ** (j - a - b)
    return [
        (coef * scale(j), IndexTerm(pole_map[pole], j))
        for coef, pole, j in pf_decompose(a, b)
    ]


def _conforming(term: IndexTerm, rel: Relation) -> bool:
    wants_weak = term.parity is Parity.ODD_HIGH
    return (rel is Relation.WEAK) == wants_weak


def _rebuild(spec: SeriesSpec, terms: list[IndexTerm], relations: list[Relation]) -> SeriesSpec | None:
    if not terms:
        return None
    return SeriesSpec(spec.binom_power, tuple(terms), tuple(relations), spec.tail_bound, spec.argument)


def convert_relations(spec: SeriesSpec) -> Combination:
    """Rewrite into sums whose relation after index j is weak iff l_j = 2n+1.

    A ``None`` spec in the output stands for the scalar 1 (a fully collapsed
    diagonal); its coefficient multiplies a_0^p = 1.
    """
    if spec.tail_bound != 0:
        raise CompileError("relation conversion requires tail_bound = 0")
    d = spec.depth
    for i in range(d):
        if _conforming(spec.terms[i], spec.relations[i]):
            continue
        flipped = Relation.WEAK if spec.relations[i] is Relation.STRICT else Relation.STRICT
        sign = 1 if spec.relations[i] is Relation.WEAK else -1  # weak = strict + diag
        rels = list(spec.relations)
        rels[i] = flipped
        out = _collect(convert_relations(_rebuild(spec, list(spec.terms), rels)))
        for coef, diag in _diagonal(spec, i):
            pieces = [(Fraction(1), diag)] if diag is None else convert_relations(diag)
            for c2, s2 in pieces:
                out.append((sign * coef * c2, s2))
        return _collect(out)
    return [(Fraction(1), spec)]


def _diagonal(spec: SeriesSpec, i: int) -> Combination:
    """Specs for the coinciding-index slice n_i = n_{i+1} (or n_d = bound)."""
    terms = list(spec.terms)
    rels = list(spec.relations)
    if i == spec.depth - 1:
        # bottom: only reached for a 2n+1 index against bound 0, where the
        # n = 0 slice contributes the factor 1 exactly
        assert terms[i].parity is Parity.ODD_HIGH
        return _safe_pieces(spec, terms[:-1], rels[:-1])
    out: Combination = []
    for coef, merged in _merge_factors(
        terms[i].parity, terms[i].exponent, terms[i + 1].parity, terms[i + 1].exponent
    ):
        new_terms = terms[:i] + [merged] + terms[i + 2 :]
        new_rels = rels[:i] + rels[i + 1 :]
        for c, piece in _safe_pieces(spec, new_terms, new_rels):
            out.append((coef * c, piece))
    return out


def _safe_pieces(spec: SeriesSpec, terms: list[IndexTerm], rels: list[Relation]) -> Combination:
    """Build pieces, pre-splitting a weak bottom over a 2n-1 index.

    Such pieces arise from diagonal merges; the n = 0 slice is defined there
    (denominator (2*0-1)^s = (-1)^s), so split it off instead of rejecting.
    """
    if not terms:
        return [(Fraction(1), None)]
    if rels[-1] is Relation.WEAK and terms[-1].parity is Parity.ODD_LOW:
        s = terms[-1].exponent
        out = _safe_pieces(spec, terms, rels[:-1] + [Relation.STRICT])
        sign = Fraction(-1 if s % 2 else 1)
        out += [(sign * c, piece) for c, piece in _safe_pieces(spec, terms[:-1], rels[:-1])]
        return out
    return [(Fraction(1), _rebuild(spec, terms, rels))]


def eliminate_inner_oddlow(spec: SeriesSpec) -> Combination:
    """Shift non-leading 2n-1 indices to 2m+1; output keeps block-shape relations.

    Pre: block-shape relations (run convert_relations first).
    """
    d = spec.depth
    target = max((j for j in range(1, d) if spec.terms[j].parity is Parity.ODD_LOW), default=None)
    if target is None:
        return [(Fraction(1), spec)]
    j = target
    terms = list(spec.terms)
    rels = list(spec.relations)
    if rels[j] is not Relation.STRICT:
        raise CompileError("inner 2n-1 index must carry a strict lower relation")

    # main piece: n_j = m+1, so 2n_j-1 = 2m+1, the lower relation weakens and
    # the upper one tightens to strict
    shifted_terms = terms[:j] + [IndexTerm(Parity.ODD_HIGH, terms[j].exponent)] + terms[j + 1 :]
    shifted_rels = rels[:]
    shifted_rels[j] = Relation.WEAK
    upper_was_strict = rels[j - 1] is Relation.STRICT
    shifted_rels[j - 1] = Relation.STRICT
    out: Combination = []
    for c, s in _renormalize(_rebuild(spec, shifted_terms, shifted_rels)):
        out.append((c, s))

    if upper_was_strict:
        # n_{j-1} > m+1 splits off the collision slice n_{j-1} = n_j
        for coef, merged in _merge_factors(
            terms[j - 1].parity, terms[j - 1].exponent, Parity.ODD_LOW, terms[j].exponent
        ):
            col_terms = terms[: j - 1] + [merged] + terms[j + 1 :]
            col_rels = rels[: j - 1] + rels[j:]
            for c, s in _renormalize(_rebuild(spec, col_terms, col_rels)):
                out.append((-coef * c, s))
    return _collect(out)


def _renormalize(spec: SeriesSpec | None) -> Combination:
    if spec is None:
        return [(Fraction(1), None)]
    out: Combination = []
    for c, s in convert_relations(spec):
        if s is None:
            out.append((c, None))
        else:
            for c2, s2 in eliminate_inner_oddlow(s):
                out.append((c * c2, s2))
    return _collect(out)


def rewrite_to_block_shape(spec: SeriesSpec) -> Combination:
    """convert_relations + eliminate_inner_oddlow, fully normalized."""
    return _renormalize(spec)


def _collect(items: Combination) -> Combination:
    acc: dict[SeriesSpec | None, Fraction] = {}
    order: list[SeriesSpec | None] = []
    for c, s in items:
        if s not in acc:
            acc[s] = Fraction(0)
            order.append(s)
        acc[s] += c
    return [(acc[s], s) for s in order if acc[s]]


def reduce_leading_gamma(spec: SeriesSpec) -> list[tuple[Fraction, SeriesSpec | GammaHead | None]]:
    """Handle a leading 2n-1 factor for plain (non-squared) sums.

    Weight 1 drops (the tail keeps its value); weight >= 2 becomes a GammaHead
    marker for compile_blocks.  None stands for the scalar 1.
    """
    if spec.binom_power != 1:
        raise CompileError("leading-gamma reduction applies to binom_power 1")
    if spec.terms[0].parity is not Parity.ODD_LOW:
        return [(Fraction(1), spec)]
    s = spec.terms[0].exponent
    tail = _rebuild(spec, list(spec.terms[1:]), list(spec.relations[1:]))
    if s == 1:
        return [(Fraction(1), tail)]
    return [(Fraction(1), GammaHead(s, tail))]


# ---------------------------------------------------------------------------
# block emission

_ALPHA, _BETA = Parity.EVEN, Parity.ODD_HIGH

_SEC_TIMES = {TrigForm.COT: TrigForm.CSC, TrigForm.CSC: TrigForm.SECCSC, TrigForm.DT: TrigForm.SEC}
_TAN_TIMES = {TrigForm.COT: TrigForm.DT, TrigForm.CSC: TrigForm.SEC, TrigForm.DT: TrigForm.TAN}

# cos(t) * form and sin(t) * form, expanded in the alphabet (the sin/cos
# members restart a peel)
_COS_TIMES = {
    TrigForm.DT: ((Fraction(1), TrigForm.COS),),
    TrigForm.COT: ((Fraction(1), TrigForm.CSC), (Fraction(-1), TrigForm.SIN)),
    TrigForm.TAN: ((Fraction(1), TrigForm.SIN),),
    TrigForm.CSC: ((Fraction(1), TrigForm.COT),),
    TrigForm.SEC: ((Fraction(1), TrigForm.DT),),
    TrigForm.SECCSC: ((Fraction(1), TrigForm.CSC),),
}
_SIN_TIMES = {
    TrigForm.DT: ((Fraction(1), TrigForm.SIN),),
    TrigForm.COT: ((Fraction(1), TrigForm.COS),),
    TrigForm.TAN: ((Fraction(1), TrigForm.SEC), (Fraction(-1), TrigForm.COS)),
    TrigForm.CSC: ((Fraction(1), TrigForm.DT),),
    TrigForm.SEC: ((Fraction(1), TrigForm.TAN),),
    TrigForm.SECCSC: ((Fraction(1), TrigForm.SEC),),
}

WordItems = list[tuple[Fraction, TrigWord]]


def _apply_mult(mult: TrigForm | None, word: TrigWord) -> TrigWord:
    if mult is None or not word:
        # an empty tail absorbs the multiplier (the boundary terms of the
        # underlying integration by parts cancel it exactly)
        return word
    table = _SEC_TIMES if mult is TrigForm.SEC else _TAN_TIMES
    head = table.get(word[0])
    if head is None:
        raise CompileError(f"no product rule for {mult.value} * {word[0].value}")
    return (head,) + word[1:]


def _plain_chain(terms: tuple[IndexTerm, ...]) -> WordItems:
    """Word combination for an EVEN/ODD_HIGH chain in block shape."""
    states: list[tuple[Fraction, TrigWord, TrigForm | None]] = [(Fraction(1), (), None)]
    d = len(terms)
    for j, term in enumerate(terms):
        if term.parity not in (_ALPHA, _BETA):
            raise CompileError("plain chain may not contain 2n-1 indices")
        s = term.exponent
        F = (TrigForm.COT,) * (s - 1)
        last = j == d - 1
        if last:
            if term.parity is _ALPHA:
                branches = [
                    (Fraction(1), F + (TrigForm.CSC,), None),
                    (Fraction(-1), F + (TrigForm.COT,), None),
                ]
            else:
                branches = [(Fraction(1), F + (TrigForm.DT,), None)]
        else:
            nxt = terms[j + 1].parity
            if term.parity is _ALPHA and nxt is _ALPHA:
                branches = [
                    (Fraction(1), F + (TrigForm.CSC,), TrigForm.SEC),
                    (Fraction(-1), F + (TrigForm.COT,), None),
                ]
            elif term.parity is _ALPHA:
                branches = [(Fraction(1), F + (TrigForm.CSC,), TrigForm.TAN)]
            elif nxt is _ALPHA:
                branches = [(Fraction(1), F + (TrigForm.DT,), TrigForm.SEC)]
            else:
                branches = [
                    (Fraction(1), F + (TrigForm.COT,), None),
                    (Fraction(1), F + (TrigForm.DT,), TrigForm.TAN),
                ]
        states = [
            (c * bc, w + _apply_mult(m, bw), bm)
            for c, w, m in states
            for bc, bw, bm in branches
        ]
    return [(c, w) for c, w, _ in states]


def _peel(items: WordItems) -> tuple[WordItems, Fraction]:
    """Resolve sin/cos head forms; returns pure-alphabet words + a constant.

    Uses, at the outer endpoint pi/2 only:
      int sin.h  = int (cos * h1).rest        int_0^{pi/2} sin dt = 1
      int cos.h  = int ((1-sin) * h1).rest    int_0^{pi/2} cos dt = 1
    Each step shortens the word, so the cascade terminates.
    """
    out: WordItems = []
    const = Fraction(0)
    stack = list(items)
    while stack:
        c, w = stack.pop()
        if not w:
            const += c
            continue
        head = w[0]
        if head not in (TrigForm.SIN, TrigForm.COS):
            out.append((c, w))
            continue
        if len(w) == 1:
            const += c
            continue
        f, rest = w[1], w[2:]
        if f in (TrigForm.SIN, TrigForm.COS):
            raise CompileError("sin/cos may only occur as a word head")
        if head is TrigForm.SIN:
            repl = list(_COS_TIMES[f])
        else:
            repl = [(Fraction(1), f)] + [(-rc, rf) for rc, rf in _SIN_TIMES[f]]
        for rc, rf in repl:
            stack.append((c * rc, (rf,) + rest))
    return out, const


def _gamma_items(s: int, chain: WordItems, next_parity: Parity | None, p: int) -> tuple[WordItems, Fraction]:
    """Unroll a leading 2n-1 block of weight s over the compiled tail chain.

    The recursion is X(s) = -X(s-1) + W(s) with the weight-1 base; W(s) is the
    explicit added word, whose shape depends on whether the next block is an
    EVEN or a 2n+1 block.  For squared sums a sin/cos Wallis prefix rides
    along and is peeled afterwards.
    """
    beta_next = next_parity is _BETA
    pre = (TrigForm.SIN,) if p == 2 else ()

    def added(j: int) -> WordItems:
        F = pre + (TrigForm.COT,) * (j - 2)
        if beta_next:
            items = [(c, F + (TrigForm.COT,) + w) for c, w in chain]
            items += [(c, F + (TrigForm.DT,) + _apply_mult(TrigForm.TAN, w)) for c, w in chain]
        else:
            items = [(c, F + (TrigForm.DT,) + _apply_mult(TrigForm.SEC, w)) for c, w in chain]
        return items

    if p == 1:
        base: WordItems = list(chain)
    elif beta_next:
        base = [(c, (TrigForm.SIN,) + w) for c, w in chain]
        base += [(-c, (TrigForm.COS,) + _apply_mult(TrigForm.TAN, w)) for c, w in chain]
    else:
        base = [(c, (TrigForm.DT,) + w) for c, w in chain]
        base += [(-c, (TrigForm.COS,) + _apply_mult(TrigForm.SEC, w)) for c, w in chain]

    sign = 1 if (s - 1) % 2 == 0 else -1
    items: WordItems = [(sign * c, w) for c, w in base]
    for j in range(2, s + 1):
        sj = 1 if (s - j) % 2 == 0 else -1
        items += [(sj * c, w) for c, w in added(j)]
    if p == 2:
        return _peel(items)
    return items, Fraction(0)


def compile_blocks(item: SeriesSpec | GammaHead | None, binom_power: int) -> TrigExpr:
    """Emit the trig-word combination for one block-shape item."""
    pow2 = 1 if binom_power == 2 else 0
    expr = TrigExpr(two_over_pi_power=pow2)

    if item is None:
        # scalar 1; inside a squared combination the value 1 is (2/pi)*(pi/2)
        if binom_power == 2:
            expr.constant_pi = Fraction(1, 2)
        else:
            expr.constant = Fraction(1)
        return expr

    if isinstance(item, GammaHead):
        head_s, tail = item.weight, item.tail
    elif item.terms[0].parity is Parity.ODD_LOW:
        head_s, tail = item.terms[0].exponent, _rebuild(item, list(item.terms[1:]), list(item.relations[1:]))
    else:
        head_s, tail = None, item

    if head_s is not None:
        if tail is not None and tail.terms[0].parity is Parity.ODD_LOW:
            raise CompileError("unsupported: 2n-1 index directly after a 2n-1 head")
        chain = _plain_chain(tail.terms) if tail is not None else [(Fraction(1), ())]
        next_parity = tail.terms[0].parity if tail is not None else None
        items, const = _gamma_items(head_s, chain, next_parity, binom_power)
        for c, w in items:
            if w:
                expr.add_term(w, c)
            else:
                const += c
        expr.constant += const
        return expr

    items = _plain_chain(tail.terms)
    if binom_power == 2:
        prefix = TrigForm.DT if tail.terms[0].parity is _ALPHA else TrigForm.CSC
        items = [(c, (prefix,) + w) for c, w in items]
    for c, w in items:
        expr.add_term(w, c)
    return expr


def compile_spec_to_trig(spec: SeriesSpec) -> TrigExpr:
    """Full rewrite: relations, index shifts, gamma handling, block emission."""
    if spec.tail_bound != 0:
        raise CompileError("compiled path requires tail_bound = 0 (use the oracle)")
    if spec.argument != 1:
        raise CompileError("compiled path requires x = 1 (use the oracle)")
    p = spec.binom_power
    total = TrigExpr(two_over_pi_power=1 if p == 2 else 0)
    for coef, item in rewrite_to_block_shape(spec):
        if item is not None and p == 1:
            for c2, reduced in reduce_leading_gamma(item):
                total += compile_blocks(reduced, p).scaled(coef * c2)
        else:
            total += compile_blocks(item, p).scaled(coef)
    return total


def predicted_weight_report(spec: SeriesSpec) -> dict:
    """Weight bookkeeping for reports: the maximal word weight the compiled
    value can involve, per the block structure of the leading indices."""
    w = spec.weight
    lead = spec.terms[0].parity
    second = spec.terms[1].parity if spec.depth > 1 else None
    if spec.binom_power == 1:
        nu = 1 if (lead is Parity.ODD_LOW and spec.terms[0].exponent >= 2) else 0
        return {"weight": w, "nu": nu, "max_word_weight": w - nu}
    eta = 2 if lead is Parity.ODD_LOW else 0
    iota = 2 if second is Parity.EVEN else 1
    return {
        "weight": w,
        "eta": eta,
        "iota": iota,
        "max_word_weight": max(w + 1 - eta, iota),
    }
