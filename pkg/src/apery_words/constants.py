"""Constant catalog and closed-form expression evaluation.

Every leaf constant is pinned to a defining word (real or imaginary part of
one iterated integral over the extended pole alphabet), so closed forms are
checkable by the same evaluator that computes compiled sums.  pi and log 2
come from mpmath's built-ins by default; their pinned words exist for
cross-checks.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpc, mpf, workprec

from .evaluate import ValueCache, eval_word
from .gauss import GaussRat
from .words import W0, X1, XMI, Atom, Word

_POLE2 = Atom(GaussRat(2))
_POLE_1MI = Atom(GaussRat(1, -1))  # 1/z for z = (1+i)/2

# name -> (word, part, rational multiplier)
CONSTANT_WORDS: dict[str, tuple[Word, str, Fraction]] = {
    "pi": ((XMI,), "im", Fraction(4)),
    "log2": ((_POLE2,), "re", Fraction(1)),
    "zeta2": ((W0, X1), "re", Fraction(1)),
    "zeta3": ((W0, W0, X1), "re", Fraction(1)),
    "G": ((W0, XMI), "im", Fraction(1)),
    "beta4": ((W0, W0, W0, XMI), "im", Fraction(1)),
    "li2_half": ((W0, _POLE2), "re", Fraction(1)),
    "li3_half": ((W0, W0, _POLE2), "re", Fraction(1)),
    "li4_half": ((W0, W0, W0, _POLE2), "re", Fraction(1)),
    "reli3": ((W0, W0, _POLE_1MI), "re", Fraction(1)),
    "imli3": ((W0, W0, _POLE_1MI), "im", Fraction(1)),
    "reli4": ((W0, W0, W0, _POLE_1MI), "re", Fraction(1)),
    "imli4": ((W0, W0, W0, _POLE_1MI), "im", Fraction(1)),
}

CATALOG_DESCRIPTIONS = {
    "pi": "pi",
    "log2": "log 2",
    "zeta2": "zeta(2)",
    "zeta3": "zeta(3)",
    "G": "Catalan constant",
    "beta4": "Dirichlet beta(4)",
    "li2_half": "Li_2(1/2)",
    "li3_half": "Li_3(1/2)",
    "li4_half": "Li_4(1/2)",
    "reli3": "Re Li_3((1+i)/2)",
    "imli3": "Im Li_3((1+i)/2)",
    "reli4": "Re Li_4((1+i)/2)",
    "imli4": "Im Li_4((1+i)/2)",
}


def constant_value(
    name: str,
    precision_bits: int = 160,
    cache: ValueCache | None = None,
    from_words: bool = False,
) -> mpf:
    """One catalog constant; built-ins for pi/log2 unless from_words is set."""
    with workprec(precision_bits + 16):
        if not from_words and name == "pi":
            return +mpmath.pi
        if not from_words and name == "log2":
            return +mpmath.log(2)
        word, part, mult = CONSTANT_WORDS[name]
        value = eval_word(word, precision_bits, cache).to_mpc()
        comp = value.real if part == "re" else value.imag
        return +(comp * mpf(mult.numerator) / mult.denominator)


@dataclass(frozen=True)
class ConstExpr:
    """Arithmetic over catalog constants and rationals, e.g. '2*G - pi*log2/2'."""

    text: str

    def tree(self) -> ast.expression:
        return ast.parse(self.text, mode="eval")


class ConstExprError(ValueError):
    pass


_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def eval_const(
    expr: ConstExpr | str,
    precision_bits: int = 160,
    cache: ValueCache | None = None,
) -> mpc:
    """Evaluate a closed-form expression tree at the requested precision."""
    if isinstance(expr, str):
        expr = ConstExpr(expr)
    leaves: dict[str, mpc] = {}

    def leaf(name: str) -> mpc:
        if name not in CONSTANT_WORDS:
            raise ConstExprError(f"unknown constant {name!r}")
        if name not in leaves:
            leaves[name] = mpc(constant_value(name, precision_bits, cache))
        return leaves[name]

    def walk(node) -> mpc:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, int):
                return mpc(node.value)
            raise ConstExprError(f"only integer literals allowed, got {node.value!r}")
        if isinstance(node, ast.Name):
            return leaf(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            value = walk(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if right == 0:
                    raise ZeroDivisionError("division by zero in closed form")
                return left / right
            if not isinstance(node.right, ast.Constant) or not isinstance(
                node.right.value, int
            ):
                raise ConstExprError("exponents must be integer literals")
            return left ** node.right.value
        raise ConstExprError(f"unsupported syntax: {ast.dump(node)}")

    with workprec(precision_bits + 16):
        return +walk(expr.tree())
