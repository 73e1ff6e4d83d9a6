"""Level-4 integrand words and the trig -> algebraic change of variables.

An Atom is the 1-form sign * dt/(pole - t); the canonical alphabet is
    w0  = dt/t            (pole 0, sign -1)
    x1  = dt/(1-t)        x-1 = dt/(-1-t)      xi, x-i likewise.
Words are tuples of atoms ordered with the leftmost factor nearest t = 1.
A word converges iff it does not start with x1 and does not end with w0.

cov() applies t -> arcsin((1-u^2)/(1+u^2)) to a trig expression: each trig
form maps to a fixed combination of atoms, the substitution reverses
orientation, so each word is reversed and picks up (-1)^length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .gauss import GaussRat
from .series import Parity, SeriesSpec
from .trig import CompileError, TrigExpr, TrigForm


@dataclass(frozen=True)
class Atom:
    """1-form sign * dt/(pole - t) with an exact Gaussian-rational pole."""

    pole: GaussRat
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


W0 = Atom(GaussRat(0), -1)
X1 = Atom(GaussRat(1), 1)
XM1 = Atom(GaussRat(-1), 1)
XI = Atom(GaussRat(0, 1), 1)
XMI = Atom(GaussRat(0, -1), 1)

_CANONICAL_NAMES = {W0: "w0", X1: "x1", XM1: "x-1", XI: "xi", XMI: "x-i"}
_NAMES_TO_ATOM = {v: k for k, v in _CANONICAL_NAMES.items()}

Word = tuple[Atom, ...]


def atom_name(atom: Atom) -> str:
    name = _CANONICAL_NAMES.get(atom)
    if name is not None:
        return name
    sign = "" if atom.sign == 1 else "-"
    return f"{sign}x({atom.pole})"


def atom_from_name(name: str) -> Atom:
    if name in _NAMES_TO_ATOM:
        return _NAMES_TO_ATOM[name]
    sign = 1
    if name.startswith("-"):
        sign = -1
        name = name[1:]
    if not (name.startswith("x(") and name.endswith(")")):
        raise ValueError(f"unknown atom name {name!r}")
    body = name[2:-1]
    re_part, im_part = Fraction(0), Fraction(0)
    if body.endswith("i"):
        head, _, tail = body[:-1].rpartition("+")
        if head:
            re_part, im_part = Fraction(head), Fraction(tail)
        else:
            head, _, tail = body[:-1].rpartition("-")
            if head and not head.endswith("/"):
                re_part, im_part = Fraction(head), -Fraction(tail)
            else:
                im_part = Fraction(body[:-1])
    else:
        re_part = Fraction(body)
    return Atom(GaussRat(re_part, im_part), sign)


def word_key(word: Word) -> str:
    return ".".join(atom_name(a) for a in word)


def is_convergent(word: Word) -> bool:
    if not word:
        return True
    return word[0] != X1 and word[-1] != W0


def deconcatenations(word: Word) -> list[tuple[Word, Word]]:
    """All splittings word = prefix . suffix, in order (len+1 of them)."""
    return [(word[:i], word[i:]) for i in range(len(word) + 1)]


class NonconvergentWordError(ValueError):
    """The change of variables produced a divergent word: a compiler bug."""


@dataclass
class WordSum:
    """Gaussian-rational combination of convergent words.

    Value = (2/pi)^pi_scale * (sum coef * I(word) + scalar + scalar_pi * pi).
    """

    terms: dict[Word, GaussRat] = field(default_factory=dict)
    pi_scale: int = 0
    scalar: GaussRat = field(default_factory=GaussRat)
    scalar_pi: Fraction = Fraction(0)

    def add_term(self, word: Word, coef: GaussRat) -> None:
        new = self.terms.get(word, GaussRat(0)) + coef
        if new:
            self.terms[word] = new
        else:
            self.terms.pop(word, None)

    def scaled(self, coef: GaussRat | Fraction | int) -> "WordSum":
        coef = coef if isinstance(coef, GaussRat) else GaussRat(coef)
        if not coef.is_real() and self.scalar_pi:
            raise ValueError("cannot scale a pi-carrying scalar by a complex factor")
        return WordSum(
            {w: c * coef for w, c in self.terms.items()},
            self.pi_scale,
            self.scalar * coef,
            self.scalar_pi * coef.re,
        )

    def max_weight(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def to_json_dict(self) -> dict:
        words = sorted(self.terms.items(), key=lambda kv: (len(kv[0]), word_key(kv[0])))
        return {
            "pi_scale": self.pi_scale,
            "scalar": {
                "re": str(self.scalar.re),
                "im": str(self.scalar.im),
                "pi": str(self.scalar_pi),
            },
            "terms": [
                {
                    "word": [atom_name(a) for a in w],
                    "coef": {"re": str(c.re), "im": str(c.im)},
                }
                for w, c in words
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "WordSum":
        ws = cls(pi_scale=int(data["pi_scale"]))
        ws.scalar = GaussRat(Fraction(data["scalar"]["re"]), Fraction(data["scalar"]["im"]))
        ws.scalar_pi = Fraction(data["scalar"]["pi"])
        for item in data["terms"]:
            word = tuple(atom_from_name(n) for n in item["word"])
            ws.add_term(word, GaussRat(Fraction(item["coef"]["re"]), Fraction(item["coef"]["im"])))
        return ws


# the substitution table: each trig form becomes a fixed atom combination
_COV = {
    TrigForm.DT: ((GaussRat(0, 1), XMI), (GaussRat(0, -1), XI)),
    TrigForm.COT: (
        (GaussRat(1), XMI),
        (GaussRat(1), XI),
        (GaussRat(-1), XM1),
        (GaussRat(-1), X1),
    ),
    TrigForm.CSC: ((GaussRat(1), XM1), (GaussRat(-1), X1)),
    TrigForm.TAN: ((GaussRat(-1), W0), (GaussRat(-1), XMI), (GaussRat(-1), XI)),
    TrigForm.SEC: ((GaussRat(-1), W0),),
    TrigForm.SECCSC: ((GaussRat(-1), W0), (GaussRat(-1), XM1), (GaussRat(-1), X1)),
}


def cov(expr: TrigExpr) -> WordSum:
    """Change of variables onto [0, 1]: expand, reverse, sign, collect."""
    ws = WordSum(pi_scale=expr.two_over_pi_power)
    ws.scalar = GaussRat(expr.constant)
    ws.scalar_pi = expr.constant_pi
    for tword, coef in expr.terms.items():
        for f in tword:
            if f not in _COV:
                raise CompileError(f"form {f.value} must be peeled before the change of variables")
        sign = -1 if len(tword) % 2 else 1
        stack: list[tuple[GaussRat, Word]] = [(GaussRat(coef * sign), ())]
        for f in tword:
            stack = [(c * fc, w + (atom,)) for c, w in stack for fc, atom in _COV[f]]
        for c, w in stack:
            ws.add_term(tuple(reversed(w)), c)
    for word in ws.terms:
        if not is_convergent(word):
            raise NonconvergentWordError(word_key(word))
    return ws


class RealityClass:
    REAL = "REAL"
    IMAGINARY_PAIRED = "IMAGINARY_PAIRED"


def reality_class(spec: SeriesSpec) -> str:
    """REAL for an even leading index, IMAGINARY_PAIRED for 2n+1.

    Applies to block-shape specs; a 2n-1 leading index must be reduced
    first.
    """
    lead = spec.terms[0].parity
    if lead is Parity.EVEN:
        return RealityClass.REAL
    if lead is Parity.ODD_HIGH:
        return RealityClass.IMAGINARY_PAIRED
    raise CompileError("reality class undefined for a 2n-1 leading index")
