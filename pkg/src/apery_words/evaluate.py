"""Numerical evaluation of words as iterated integrals over [0, 1].

A word is evaluated by Chen's composition rule at a split point c (1/2 by
default):

    I_[0,1](w) = sum over splittings w = u.v of I_[c,1](u) * I_[0,c](v),

the upper piece is mapped onto [0, 1-c] by t -> 1-t (atom (b, s) becomes
(1-b, -s), word reversed), and each piece is integrated by maintaining the
suffix integral as a truncated power series: dividing by (b - t) is the
first-order recurrence q_m = (p_m + q_{m-1})/b, so one atom costs O(N).

All poles keep distance >= 1 from the origin (or sit at 0 with the dt/t
form), so the series converge geometrically at rate c/|b| <= c.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpc, mpf, workprec

from .gauss import GaussRat
from .words import Atom, Word, WordSum, deconcatenations, is_convergent, word_key

_MIN_BITS = 64
_GUARD_BITS = 24


class DivergentWordError(ValueError):
    """eval_word was handed a word failing the convergence rule."""


class PoleTooCloseError(ValueError):
    """A nonzero pole with |b| < 1 reached the segment integrator."""


@dataclass
class BigComplex:
    """Arbitrary-precision complex value tagged with its working precision."""

    real: mpf
    imag: mpf
    precision_bits: int

    def __post_init__(self):
        if self.precision_bits < _MIN_BITS:
            raise ValueError(f"precision_bits must be >= {_MIN_BITS}")
        if not (mpmath.isfinite(self.real) and mpmath.isfinite(self.imag)):
            raise ValueError("BigComplex components must be finite")

    def to_mpc(self) -> mpc:
        return mpc(self.real, self.imag)

    @classmethod
    def from_mpc(cls, value: mpc, precision_bits: int) -> "BigComplex":
        return cls(value.real, value.imag, precision_bits)

    def __abs__(self):
        return abs(self.to_mpc())


@dataclass(frozen=True)
class SegmentWord:
    """A word restricted to [0, c]; poles must satisfy |b| >= 1 or b = 0."""

    atoms: tuple[Atom, ...]
    segment_radius: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if not (0 < self.segment_radius < 1):
            raise ValueError("segment_radius must lie in (0, 1)")


def _flip(atom: Atom) -> Atom:
    """The t -> 1-t image of an atom."""
    return Atom(GaussRat(1) - atom.pole, -atom.sign)


def eval_segment(sw: SegmentWord, precision_bits: int, n_terms: int | None = None) -> BigComplex:
    """Integrate the word over c > t_1 > ... > t_k > 0 by power series."""
    radius = sw.segment_radius
    for i, atom in enumerate(sw.atoms):
        if atom.pole == GaussRat(0):
            if i == len(sw.atoms) - 1:
                raise DivergentWordError("dt/t-type atom at the position nearest 0")
        elif atom.pole.norm2() < 1:
            raise PoleTooCloseError(f"pole {atom.pole} inside the unit disk")
    if n_terms is None:
        n_terms = int(
            math.ceil((precision_bits + 48) * math.log(2) / -math.log(float(radius)))
        )
    with workprec(precision_bits + _GUARD_BITS):
        coeffs = [mpc(1)] + [mpc(0)] * n_terms
        for atom in reversed(sw.atoms):
            sign = atom.sign
            if atom.pole == GaussRat(0):
                # sign * dt/(0 - t): integral of -sign * P(u)/u
                new = [mpc(0)] * (n_terms + 1)
                for m in range(1, n_terms + 1):
                    new[m] = -sign * coeffs[m] / m
            else:
                inv_b = 1 / atom.pole.to_mpc()
                new = [mpc(0)] * (n_terms + 1)
                q = coeffs[0] * inv_b
                new[1] = sign * q
                for m in range(1, n_terms):
                    q = (coeffs[m] + q) * inv_b
                    new[m + 1] = sign * q / (m + 1)
            coeffs = new
        r = mpf(radius.numerator) / radius.denominator
        total = mpc(0)
        for c in reversed(coeffs):
            total = total * r + c
        return BigComplex.from_mpc(+total, precision_bits)


class ValueCache:
    """Persistent (word, precision) -> value store, JSON lines on disk.

    Inserts append; corrupt lines are skipped on load; concurrent writers can
    only race on identical idempotent values.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = os.fspath(path) if path is not None else None
        self._mem: dict[tuple[str, int], BigComplex] = {}
        if self.path is not None and os.path.exists(self.path):
            self._load()

    def _load(self) -> None:
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    bits = int(rec["p"])
                    with workprec(bits + _GUARD_BITS):
                        value = BigComplex(mpf(rec["re"]), mpf(rec["im"]), bits)
                except (ValueError, KeyError, TypeError):
                    continue
                self._mem[(rec["k"], bits)] = value

    def get(self, key: str, precision_bits: int) -> BigComplex | None:
        return self._mem.get((key, precision_bits))

    def put(self, key: str, precision_bits: int, value: BigComplex) -> None:
        if (key, precision_bits) in self._mem:
            return
        self._mem[(key, precision_bits)] = value
        if self.path is None:
            return
        digits = int(precision_bits / 3.32) + 8
        rec = {
            "k": key,
            "p": precision_bits,
            "re": mpmath.nstr(value.real, digits),
            "im": mpmath.nstr(value.imag, digits),
        }
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


# in-process memo for segment pieces; prefixes repeat heavily across words
_segment_memo: dict[tuple[tuple[Atom, ...], Fraction, int], mpc] = {}


def clear_segment_memo() -> None:
    _segment_memo.clear()


def _segment_value(atoms: tuple[Atom, ...], radius: Fraction, bits: int) -> mpc:
    if not atoms:
        return mpc(1)
    key = (atoms, radius, bits)
    hit = _segment_memo.get(key)
    if hit is None:
        hit = eval_segment(SegmentWord(atoms, radius), bits).to_mpc()
        _segment_memo[key] = hit
    return hit


def _eval_word_at_split(word: Word, c: Fraction, precision_bits: int) -> mpc:
    upper_radius = 1 - c
    with workprec(precision_bits + _GUARD_BITS):
        total = mpc(0)
        for prefix, suffix in deconcatenations(word):
            upper = tuple(_flip(a) for a in reversed(prefix))
            total += _segment_value(upper, upper_radius, precision_bits) * _segment_value(
                suffix, c, precision_bits
            )
        return +total


def eval_word(
    word: Word,
    precision_bits: int,
    cache: ValueCache | None = None,
) -> BigComplex:
    """Value of a convergent word over [0, 1], split at 1/2."""
    if not is_convergent(word):
        raise DivergentWordError(word_key(word))
    if not word:
        with workprec(precision_bits):
            return BigComplex(mpf(1), mpf(0), precision_bits)
    key = word_key(word)
    if cache is not None:
        hit = cache.get(key, precision_bits)
        if hit is not None:
            return hit
    value = BigComplex.from_mpc(
        _eval_word_at_split(word, Fraction(1, 2), precision_bits), precision_bits
    )
    if cache is not None:
        cache.put(key, precision_bits, value)
    return value


def split_consistency(word: Word, c: Fraction, precision_bits: int) -> BigComplex:
    """Evaluate via a split at c (1/3, 1/2 or 2/3); test harness only."""
    if c not in (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)):
        raise ValueError("split point must be 1/3, 1/2 or 2/3")
    if not is_convergent(word):
        raise DivergentWordError(word_key(word))
    return BigComplex.from_mpc(
        _eval_word_at_split(word, c, precision_bits), precision_bits
    )


def eval_wordsum(
    ws: WordSum,
    precision_bits: int,
    cache: ValueCache | None = None,
) -> BigComplex:
    """sum coef * I(word) + scalar (+ pi part), scaled by (2/pi)^pi_scale."""
    with workprec(precision_bits + _GUARD_BITS):
        total = mpc(0)
        for word, coef in ws.terms.items():
            total += coef.to_mpc() * eval_word(word, precision_bits, cache).to_mpc()
        total += ws.scalar.to_mpc()
        if ws.scalar_pi:
            total += mpf(ws.scalar_pi.numerator) / ws.scalar_pi.denominator * mpmath.pi
        if ws.pi_scale:
            total *= (2 / mpmath.pi) ** ws.pi_scale
        return BigComplex.from_mpc(+total, precision_bits)
