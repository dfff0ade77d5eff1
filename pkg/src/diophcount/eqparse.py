"""Equation text -> normalized AST.

Grammar (whitespace insignificant)::

    equation := expr "=" expr
    expr     := term (("+" | "-") term)*
    term     := factor ("*" factor)*
    factor   := "-" factor | atom ("^" atom)?
    atom     := integer | variable | "(" expr ")" | "-" atom
    variable := "x" digits

Unary minus binds looser than ``^`` so ``-x1^2`` reads as ``-(x1^2)``.
The atom form ``-atom`` survives only in exponent position, where a negative
exponent is rejected anyway.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Callable, Union

from .algebra import Polynomial
from .errors import (
    EquationSyntaxError,
    NotAlgebraic,
    UnknownVariable,
    UnsupportedConstruct,
)


# --- AST ---


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Sum:
    terms: tuple


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class Power:
    base: "Expr"
    exponent: "Expr"


@dataclass(frozen=True)
class Negate:
    operand: "Expr"


Expr = Union[Const, Var, Sum, Product, Power, Negate]


class Kind(enum.Enum):
    ALGEBRAIC = "algebraic"
    NON_ALGEBRAIC = "non-algebraic"


@dataclass(frozen=True)
class Equation:
    """``lhs = rhs`` with ``F = lhs - rhs`` folded into canonical form."""

    F: Expr
    k: int
    kind: Kind
    degree: int | None  # None for non-algebraic equations
    lhs: Expr
    rhs: Expr

    @property
    def is_algebraic(self) -> bool:
        return self.kind is Kind.ALGEBRAIC

    def variables(self) -> tuple[int, ...]:
        return tuple(sorted(variables_of(self.F)))

    def __str__(self):
        return f"{format_expr(self.F)} = 0"


# --- tokenizer ---

_VARIABLE = re.compile(r"x(\d+)")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_DIGITS = re.compile(r"\d+")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "var", "op", "end"
    value: object
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit():
            m = _DIGITS.match(text, pos)
            tokens.append(_Tok("int", int(m.group()), pos))
            pos = m.end()
            continue
        m = _NAME.match(text, pos)
        if m:
            name = m.group()
            if text[m.end():].lstrip().startswith("("):
                raise UnsupportedConstruct(f"function application '{name}(...)' at offset {pos}")
            vm = _VARIABLE.fullmatch(name)
            if vm is None or int(vm.group(1)) < 1:
                raise UnknownVariable(f"'{name}' at offset {pos}; variables are x1, x2, ...")
            tokens.append(_Tok("var", int(vm.group(1)), pos))
            pos = m.end()
            continue
        if ch in "/%":
            raise UnsupportedConstruct(f"'{ch}' at offset {pos}; division is not supported")
        if ch not in "+-*^()=":
            raise EquationSyntaxError(f"unexpected character {ch!r}", pos, text)
        tokens.append(_Tok("op", ch, pos))
        pos += 1
    tokens.append(_Tok("end", None, len(text.rstrip())))
    return tokens


# --- parser ---


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.tokens[self.i]

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.value == op:
            self.i += 1
            return True
        return False

    def fail(self, expected: str):
        tok = self.tok
        got = "end of input" if tok.kind == "end" else repr(str(tok.value))
        raise EquationSyntaxError(f"expected {expected}, got {got}", tok.pos, self.text)

    def equation(self):
        lhs = self.expr()
        if not self.accept("="):
            self.fail("'='")
        rhs = self.expr()
        if self.tok.kind != "end":
            self.fail("end of input")
        return lhs, rhs

    def expr(self):
        terms = [self.term()]
        while True:
            if self.accept("+"):
                terms.append(self.term())
            elif self.accept("-"):
                terms.append(Negate(self.term()))
            else:
                break
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.accept("*"):
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self):
        if self.accept("-"):
            return Negate(self.factor())
        base = self.atom()
        if self.accept("^"):
            start = self.tok.pos
            exponent = self.atom()
            _check_exponent(exponent, start)
            return Power(base, exponent)
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return Const(tok.value)
        if tok.kind == "var":
            self.i += 1
            return Var(tok.value)
        if self.accept("("):
            inner = self.expr()
            if not self.accept(")"):
                self.fail("')'")
            return inner
        if self.accept("-"):
            return Negate(self.atom())
        self.fail("a number, variable or '('")


def _check_exponent(exponent, pos):
    if _contains_negation(exponent):
        raise UnsupportedConstruct(
            f"subtraction or negation in an exponent at offset {pos}; exponents must be natural"
        )


def _contains_negation(e) -> bool:
    if isinstance(e, Negate):
        return True
    if isinstance(e, Sum):
        return any(_contains_negation(t) for t in e.terms)
    if isinstance(e, Product):
        return any(_contains_negation(f) for f in e.factors)
    if isinstance(e, Power):
        return _contains_negation(e.base) or _contains_negation(e.exponent)
    return False


# --- canonical folding ---

_MAX_CONST_BITS = 1 << 20


def fold(e: Expr) -> Expr:
    """Fold constants and put ``e`` in canonical form.

    Canonical sums are flat with at most one trailing constant; canonical
    products carry at most one leading positive coefficient, with any sign
    pulled out into a ``Negate``.  ``fold`` is idempotent.
    """
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Negate):
        inner = fold(e.operand)
        if isinstance(inner, Const):
            return Const(-inner.value)
        if isinstance(inner, Negate):
            return inner.operand
        return Negate(inner)
    if isinstance(e, Power):
        base, exponent = fold(e.base), fold(e.exponent)
        if isinstance(exponent, Const):
            if exponent.value < 0:
                raise UnsupportedConstruct("negative exponent")
            if exponent.value == 0:
                return Const(1)
            if exponent.value == 1:
                return base
            if isinstance(base, Const):
                if abs(base.value) > 1 and exponent.value * abs(base.value).bit_length() > _MAX_CONST_BITS:
                    raise UnsupportedConstruct("constant power too large to fold")
                return Const(base.value ** exponent.value)
        elif isinstance(base, Const) and base.value == 1:
            return Const(1)
        return Power(base, exponent)
    if isinstance(e, Product):
        coef = 1
        rest = []
        for f in e.factors:
            f = fold(f)
            while isinstance(f, Negate):
                coef = -coef
                f = f.operand
            if isinstance(f, Product):
                for g in f.factors:
                    if isinstance(g, Const):
                        coef *= g.value
                    else:
                        rest.append(g)
            elif isinstance(f, Const):
                coef *= f.value
            else:
                rest.append(f)
        if coef == 0:
            return Const(0)
        if not rest:
            return Const(coef)
        body = tuple(rest) if abs(coef) == 1 else (Const(abs(coef)),) + tuple(rest)
        node = body[0] if len(body) == 1 else Product(body)
        return Negate(node) if coef < 0 else node
    if isinstance(e, Sum):
        const = 0
        terms = []
        for t in e.terms:
            t = fold(t)
            parts = t.terms if isinstance(t, Sum) else (t,)
            for p in parts:
                if isinstance(p, Const):
                    const += p.value
                else:
                    terms.append(p)
        if const:
            terms.append(Const(const))
        if not terms:
            return Const(0)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))
    raise TypeError(f"not an expression node: {e!r}")


# --- queries ---


def variables_of(e: Expr) -> set[int]:
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, Const):
        return set()
    if isinstance(e, Negate):
        return variables_of(e.operand)
    if isinstance(e, Power):
        return variables_of(e.base) | variables_of(e.exponent)
    children = e.terms if isinstance(e, Sum) else e.factors
    out: set[int] = set()
    for c in children:
        out |= variables_of(c)
    return out


def is_algebraic_expr(e: Expr) -> bool:
    """True iff no ``Power`` node has a non-constant exponent."""
    if isinstance(e, (Const, Var)):
        return True
    if isinstance(e, Negate):
        return is_algebraic_expr(e.operand)
    if isinstance(e, Power):
        return not variables_of(e.exponent) and is_algebraic_expr(e.base)
    children = e.terms if isinstance(e, Sum) else e.factors
    return all(is_algebraic_expr(c) for c in children)


def evaluate(e: Expr, values) -> int:
    """Tree-walking exact evaluation; ``values[i - 1]`` is ``x_i``."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return values[e.index - 1]
    if isinstance(e, Negate):
        return -evaluate(e.operand, values)
    if isinstance(e, Sum):
        return sum(evaluate(t, values) for t in e.terms)
    if isinstance(e, Product):
        out = 1
        for f in e.factors:
            out *= evaluate(f, values)
        return out
    if isinstance(e, Power):
        exponent = evaluate(e.exponent, values)
        if exponent < 0:
            raise UnsupportedConstruct("negative exponent during evaluation")
        return evaluate(e.base, values) ** exponent
    raise TypeError(f"not an expression node: {e!r}")


def _to_python(e: Expr) -> str:
    if isinstance(e, Const):
        return f"({e.value})"
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Negate):
        return f"(-{_to_python(e.operand)})"
    if isinstance(e, Sum):
        return "(" + " + ".join(_to_python(t) for t in e.terms) + ")"
    if isinstance(e, Product):
        return "(" + " * ".join(_to_python(f) for f in e.factors) + ")"
    if isinstance(e, Power):
        return f"({_to_python(e.base)} ** {_to_python(e.exponent)})"
    raise TypeError(f"not an expression node: {e!r}")


def compile_expr(e: Expr, k: int) -> Callable[..., int]:
    """Compile ``e`` into a function of positional arguments ``x1..xk``.

    The generated source only ever contains integer literals, the names
    ``x1..xk`` and arithmetic operators.
    """
    args = ", ".join(f"x{i}" for i in range(1, k + 1))
    return eval(f"lambda {args}: {_to_python(e)}", {"__builtins__": {}})


# --- printing ---


def _needs_parens(e: Expr, context: str) -> bool:
    if isinstance(e, Sum):
        return True
    if isinstance(e, Negate):
        return context != "sum"
    if isinstance(e, Const) and e.value < 0:
        return context != "sum"
    if isinstance(e, Product):
        return context == "power"
    if isinstance(e, Power):
        return context == "power"
    return False


def _wrap(e: Expr, context: str) -> str:
    s = format_expr(e)
    return f"({s})" if _needs_parens(e, context) else s


def format_expr(e: Expr) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Negate):
        inner = e.operand
        body = f"({format_expr(inner)})" if isinstance(inner, (Sum, Negate)) else format_expr(inner)
        return f"-{body}"
    if isinstance(e, Sum):
        out = format_expr(e.terms[0]) if not isinstance(e.terms[0], Sum) else f"({format_expr(e.terms[0])})"
        for t in e.terms[1:]:
            if isinstance(t, Negate):
                inner = t.operand
                body = f"({format_expr(inner)})" if isinstance(inner, (Sum, Negate)) else format_expr(inner)
                out += f" - {body}"
            elif isinstance(t, Const) and t.value < 0:
                out += f" - {-t.value}"
            else:
                out += f" + {_wrap(t, 'sum')}"
        return out
    if isinstance(e, Product):
        return "*".join(_wrap(f, "product") for f in e.factors)
    if isinstance(e, Power):
        return f"{_wrap(e.base, 'power')}^{_wrap(e.exponent, 'power')}"
    raise TypeError(f"not an expression node: {e!r}")


# --- entry points ---


def parse_expression(text: str) -> Expr:
    """Parse a bare expression (no ``=``) and fold it."""
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "end":
        p.fail("end of input")
    return fold(e)


def parse_equation(text: str, k: int | None = None) -> Equation:
    """Parse ``lhs = rhs`` into a folded equation ``F = 0``.

    On its own an equation must use x1..xk without gaps.  Members of a
    system pass the system's ``k`` and may use any subset of x1..xk.
    """
    lhs, rhs = _Parser(text).equation()
    raw_vars = variables_of(lhs) | variables_of(rhs)
    top = max(raw_vars, default=0)
    if k is None:
        k = top
        missing = sorted(set(range(1, k + 1)) - raw_vars)
        if missing:
            raise UnknownVariable(
                f"variables must be numbered x1..x{k} without gaps; missing x{missing[0]}"
            )
    elif top > k:
        raise UnknownVariable(f"x{top} used but the enclosing system has k={k}")
    lhs, rhs = fold(lhs), fold(rhs)
    F = fold(Sum((lhs, Negate(rhs))))
    if is_algebraic_expr(F):
        degree = _expand(F, k).degree
        return Equation(F, k, Kind.ALGEBRAIC, degree, lhs, rhs)
    return Equation(F, k, Kind.NON_ALGEBRAIC, None, lhs, rhs)


def parse_system(texts) -> list[Equation]:
    """Parse several equations sharing one k, the largest index used."""
    sides = [_Parser(t).equation() for t in texts]
    k = max((max(variables_of(l) | variables_of(r), default=0) for l, r in sides), default=0)
    return [parse_equation(t, k) for t in texts]


def _expand(e: Expr, k: int) -> Polynomial:
    if isinstance(e, Const):
        return Polynomial.constant(e.value, k)
    if isinstance(e, Var):
        return Polynomial.variable(e.index, k)
    if isinstance(e, Negate):
        return -_expand(e.operand, k)
    if isinstance(e, Sum):
        out = Polynomial.constant(0, k)
        for t in e.terms:
            out = out + _expand(t, k)
        return out
    if isinstance(e, Product):
        out = Polynomial.constant(1, k)
        for f in e.factors:
            out = out * _expand(f, k)
        return out
    if isinstance(e, Power):
        if variables_of(e.exponent):
            raise NotAlgebraic(f"variable exponent in {format_expr(e)}")
        return _expand(e.base, k) ** evaluate(e.exponent, ())
    raise TypeError(f"not an expression node: {e!r}")


def expand_polynomial(eq: Equation) -> Polynomial:
    if not eq.is_algebraic:
        raise NotAlgebraic(f"{eq} has variable exponents")
    return _expand(eq.F, eq.k)
