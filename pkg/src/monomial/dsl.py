"""A small text format for linear ODEs with polynomial coefficients.

::

    # Hermite, n = 3
    param n = 3
    y'' - 2*x*y' + 2*n*y = 0

Grammar (after ``param`` lines and ``#`` comments)::

    equation := expr "=" expr
    expr     := term (("+" | "-") term)*
    term     := factor ("*" factor)*
    factor   := ["-"] ( rational | ident | "x" ["^" integer] | "y" "'"* | "(" expr ")" )

Everything free of y is moved to the right-hand side as the source.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .core import GeneralizedSeries, as_scalar
from .errors import NonlinearTerm, ParseError, UnboundParameter
from .normal_form import LinearODE

FREE = -1  # key of the y-free part in a linear form

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^=()'])
    """,
    re.VERBOSE,
)
_PARAM = re.compile(r"^\s*param\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(-?\s*\d+(?:/\d+)?)\s*$")


@dataclass(frozen=True)
class OdeSource:
    text: str
    bindings: Mapping[str, Fraction] = field(default_factory=dict)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


# a linear form maps derivative order (or FREE) to a sparse polynomial in x
Form = Dict[int, Dict[int, Fraction]]


def _const(c: Fraction) -> Form:
    return {FREE: {0: c}} if c else {}


def _add(a: Form, b: Form, sign: int = 1) -> Form:
    out = {k: dict(v) for k, v in a.items()}
    for k, poly in b.items():
        dst = out.setdefault(k, {})
        for p, c in poly.items():
            dst[p] = dst.get(p, Fraction(0)) + sign * c
    return {k: {p: c for p, c in v.items() if c} for k, v in out.items() if any(v.values())}


def _poly_mul(a: Dict[int, Fraction], b: Dict[int, Fraction]) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for p, c in a.items():
        for q, d in b.items():
            out[p + q] = out.get(p + q, Fraction(0)) + c * d
    return {p: c for p, c in out.items() if c}


def _mul(a: Form, b: Form, tok: _Tok) -> Form:
    ya = [k for k in a if k != FREE]
    yb = [k for k in b if k != FREE]
    if ya and yb:
        raise NonlinearTerm(tok.line, tok.col)
    if yb:
        a, b = b, a
    # b is now y-free
    scalar = b.get(FREE, {})
    out: Form = {}
    for k, poly in a.items():
        prod = _poly_mul(poly, scalar)
        if prod:
            out[k] = prod
    return out


class _Parser:
    def __init__(self, tokens: List[_Tok], bindings: Mapping[str, Fraction], end: Tuple[int, int]):
        self.toks = tokens
        self.i = 0
        self.bindings = bindings
        self.end = end

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def _fail(self, expected: str):
        tok = self.peek()
        line, col = (tok.line, tok.col) if tok else self.end
        raise ParseError(line, col, expected)

    def take(self, text: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.text != text:
            self._fail(repr(text))
        self.i += 1
        return tok

    def equation(self) -> Form:
        lhs = self.expr()
        self.take("=")
        rhs = self.expr()
        if self.peek() is not None:
            self._fail("end of equation")
        return _add(lhs, rhs, -1)

    def expr(self) -> Form:
        out = self.term()
        while self.peek() is not None and self.peek().text in "+-":
            sign = 1 if self.take(self.peek().text).text == "+" else -1
            out = _add(out, self.term(), sign)
        return out

    def term(self) -> Form:
        out = self.factor()
        while self.peek() is not None and self.peek().text == "*":
            star = self.take("*")
            out = _mul(out, self.factor(), star)
        return out

    def factor(self) -> Form:
        tok = self.peek()
        if tok is None:
            self._fail("a factor")
        if tok.text == "-":
            self.i += 1
            return _add({}, self.factor(), -1)
        if tok.kind == "num":
            self.i += 1
            return _const(Fraction(tok.text))
        if tok.text == "(":
            self.i += 1
            inner = self.expr()
            self.take(")")
            return inner
        if tok.kind == "name" and tok.text == "x":
            self.i += 1
            power = 1
            if self.peek() is not None and self.peek().text == "^":
                self.i += 1
                num = self.peek()
                if num is None or num.kind != "num" or "/" in num.text:
                    self._fail("an integer exponent")
                self.i += 1
                power = int(num.text)
            return {FREE: {power: Fraction(1)}}
        if tok.kind == "name" and tok.text == "y":
            self.i += 1
            order = 0
            while self.peek() is not None and self.peek().text == "'":
                self.i += 1
                order += 1
            return {order: {0: Fraction(1)}}
        if tok.kind == "name":
            self.i += 1
            if tok.text not in self.bindings:
                raise UnboundParameter(tok.text, tok.line, tok.col)
            return _const(self.bindings[tok.text])
        self._fail("a number, parameter, x, y or '('")


def _tokenize(text: str, line: int) -> List[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(line, pos + 1, "a number, name or one of - + * ^ = ( ) '")
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(), line, pos + 1))
        pos = m.end()
    return out


def parse_bindings(items) -> Dict[str, Fraction]:
    """``k=p/q`` strings to a binding map."""
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"expected name=value, got {item!r}")
        out[key.strip()] = as_scalar(value.strip())
    return out


def parse_ode(src, bindings: Optional[Mapping] = None) -> LinearODE:
    """Parse DSL text (or an :class:`OdeSource`) to a :class:`LinearODE`.

    ``bindings`` override ``param`` lines of the same name.
    """
    if isinstance(src, OdeSource):
        text, extra = src.text, dict(src.bindings)
    else:
        text, extra = src, {}
    extra.update(bindings or {})
    params: Dict[str, Fraction] = {}
    tokens: List[_Tok] = []
    last = (1, 1)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if re.match(r"\s*param\s", line):
            m = _PARAM.match(line)
            if not m:
                raise ParseError(lineno, line.index("param") + 1, "param <name> = <rational>")
            if tokens:
                raise ParseError(lineno, 1, "param lines before the equation")
            params[m.group(1)] = Fraction(m.group(2).replace(" ", ""))
            continue
        tokens.extend(_tokenize(line, lineno))
        last = (lineno, len(line.rstrip()) + 1)
    if not tokens:
        raise ParseError(last[0], last[1], "an equation")
    params.update({k: as_scalar(v) for k, v in extra.items()})
    form = _Parser(tokens, params, last).equation()
    return _form_to_ode(form, tokens[0])


def _form_to_ode(form: Form, first: _Tok) -> LinearODE:
    orders = [k for k in form if k != FREE]
    if not orders or max(orders) < 1:
        raise ParseError(first.line, first.col, "an equation containing a derivative of y")
    top = max(orders)
    polys = tuple(form.get(b, {}) for b in range(top + 1))
    free = form.get(FREE, {})
    source = None
    if free:
        if any(p < 0 for p in free):
            raise ParseError(first.line, first.col, "non-negative powers of x")
        source = GeneralizedSeries({p: -c for p, c in free.items()})
    return LinearODE(polys, source)


def format_ode(ode: LinearODE) -> str:
    """DSL text that parses back to ``ode``."""
    parts = []
    for b, poly in enumerate(ode.coeff_polys):
        if not poly:
            continue
        body = " + ".join(f"({c})*x^{p}" if p else f"({c})" for p, c in sorted(poly.items()))
        parts.append(f"({body})*y" + "'" * b)
    rhs = "0"
    if ode.source is not None:
        if any(e.denominator != 1 or e < 0 for e in ode.source.terms):
            raise ValueError("only polynomial sources have a text form")
        rhs = " + ".join(f"({c})*x^{int(p)}" for p, c in ode.source.items()) or "0"
    return " + ".join(parts) + " = " + rhs
