"""Polynomial-coefficient linear ODEs and their split into F(D) + P.

A term ``c * x**a * (d/dx)**b`` of the equation, after multiplying the whole
equation by ``x**s``, is diagonal when ``a + s == b`` because
``x**b (d/dx)**b = D (D-1) ... (D-b+1)``.  Everything else is a shift term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from .core import (
    DiagonalOp,
    GeneralizedSeries,
    MixedOp,
    OpTerm,
    Poly,
    apply_diagonal,
    apply_mixed,
    apply_op_term,
    as_scalar,
    format_scalar,
)
from .errors import NoDiagonalPart

SparsePoly = Dict[int, Fraction]


def _clean_poly(p: Mapping) -> SparsePoly:
    out = {}
    for k, c in p.items():
        k = int(k)
        c = as_scalar(c)
        if k < 0:
            raise ValueError("coefficient polynomials take non-negative powers only")
        if c:
            out[k] = out.get(k, Fraction(0)) + c
    return {k: c for k, c in sorted(out.items()) if c}


@dataclass(frozen=True)
class LinearODE:
    """sum_b p_b(x) y^(b)(x) = Q(x) with polynomial p_b."""

    coeff_polys: Tuple[SparsePoly, ...]
    source: Optional[GeneralizedSeries] = None

    def __post_init__(self):
        polys = tuple(_clean_poly(p) for p in self.coeff_polys)
        while len(polys) > 1 and not polys[-1]:
            polys = polys[:-1]
        if not polys or not polys[-1] or len(polys) < 2:
            raise ValueError("an ODE needs a nonzero coefficient on a derivative of order >= 1")
        object.__setattr__(self, "coeff_polys", polys)
        if self.source is not None and self.source.is_zero() and self.source.frontier is None:
            object.__setattr__(self, "source", None)

    @property
    def order(self) -> int:
        return len(self.coeff_polys) - 1

    @property
    def max_degree(self) -> int:
        return max((max(p) for p in self.coeff_polys if p), default=0)

    def terms(self) -> Iterator[Tuple[Fraction, int, int]]:
        """(c, a, b) for every monomial term c x^a d^b."""
        for b, p in enumerate(self.coeff_polys):
            for a, c in p.items():
                yield c, a, b

    def apply(self, y: GeneralizedSeries) -> GeneralizedSeries:
        """The left-hand side operator applied to ``y`` (source not subtracted)."""
        out = GeneralizedSeries.zero(direction=y.direction)
        for c, a, b in self.terms():
            out = out + apply_op_term_general(c, a, b, y)
        return out

    def evaluate_coefficients(self, x0: float) -> List[float]:
        return [sum(float(c) * x0**a for a, c in p.items()) for p in self.coeff_polys]

    def pretty(self) -> str:
        parts = []
        for c, a, b in self.terms():
            xs = "" if a == 0 else ("x" if a == 1 else f"x^{a}")
            ys = "y" + "'" * b
            parts.append(f"({format_scalar(c)})" + (f"*{xs}" if xs else "") + f"*{ys}")
        lhs = " + ".join(parts)
        rhs = "0" if self.source is None else repr(self.source)
        return f"{lhs} = {rhs}"


def apply_op_term_general(c, a: int, b: int, y: GeneralizedSeries) -> GeneralizedSeries:
    """c x^a d^b on y, diagonal terms allowed (unlike OpTerm)."""
    if a != b:
        return apply_op_term(OpTerm(c, a, b), y)
    return apply_diagonal(DiagonalOp(Poly.falling(b) * as_scalar(c)), y)


@dataclass(frozen=True)
class OperatorSplit:
    F: DiagonalOp
    P: MixedOp
    shift: int = 0
    scaled_source: Optional[GeneralizedSeries] = None

    def __post_init__(self):
        if not isinstance(self.F, DiagonalOp):
            object.__setattr__(self, "F", DiagonalOp(self.F.coeffs if isinstance(self.F, Poly) else self.F))
        if not isinstance(self.P, MixedOp):
            object.__setattr__(self, "P", MixedOp(self.P))
        if self.F.is_zero():
            raise NoDiagonalPart(self.shift)

    def apply(self, y: GeneralizedSeries) -> GeneralizedSeries:
        """(F + P) y."""
        return apply_diagonal(self.F, y) + apply_mixed(self.P, y)

    def expanded_terms(self) -> List[Tuple[Fraction, int, int]]:
        """F rewritten through D^n = sum_k S(n,k) x^k d^k, followed by P's terms."""
        out: Dict[int, Fraction] = {}
        for n, a in enumerate(self.F.coeffs):
            for k, st in enumerate(_stirling2_row(n)):
                if st and a:
                    out[k] = out.get(k, Fraction(0)) + a * st
        diag = [(c, k, k) for k, c in sorted(out.items()) if c]
        return diag + [(t.c, t.i, t.j) for t in self.P.terms]

    def pretty(self) -> str:
        text = f"F(D) = {self.F.pretty()}\nP     = {self.P.pretty()}\nshift = {self.shift}"
        if self.scaled_source is not None:
            text += f"\nQ     = {self.scaled_source!r}"
        return text


def _stirling2_row(n: int) -> List[int]:
    row = [1]
    for m in range(1, n + 1):
        new = [0] * (m + 1)
        for k in range(1, m + 1):
            new[k] = k * (row[k] if k < len(row) else 0) + row[k - 1]
        row = new
    return row


def to_operator_form(ode: LinearODE, s: int = 0) -> OperatorSplit:
    if s < 0:
        raise ValueError("negative shifts are not used; reach descending series via reciprocal_transform")
    F = DiagonalOp()
    P = []
    for c, a, b in ode.terms():
        i = a + s
        if i == b:
            F = F + DiagonalOp(Poly.falling(b) * c)
        else:
            P.append(OpTerm(c, i, b))
    if F.is_zero():
        raise NoDiagonalPart(s)
    source = None if ode.source is None else ode.source.shift(s)
    return OperatorSplit(F, MixedOp(P), s, source)


@dataclass(frozen=True)
class ShiftCandidate:
    shift: int
    degree: int
    root_count: int
    full: bool


@dataclass(frozen=True)
class NormalizationReport:
    candidates: Tuple[ShiftCandidate, ...] = field(default_factory=tuple)

    @property
    def flagged(self) -> List[int]:
        return [c.shift for c in self.candidates if c.full]

    def recommended(self) -> Optional[int]:
        if self.flagged:
            return self.flagged[0]
        if self.candidates:
            return max(self.candidates, key=lambda c: (c.degree, -c.shift)).shift
        return None


def suggest_shift(ode: LinearODE) -> NormalizationReport:
    """Every shift in 0..order+max_degree that leaves a nonzero F(D)."""
    out = []
    for s in range(ode.order + ode.max_degree + 1):
        try:
            split = to_operator_form(ode, s)
        except NoDiagonalPart:
            continue
        deg = split.F.degree
        out.append(ShiftCandidate(s, deg, len(split.F.rational_roots()), deg == ode.order))
    return NormalizationReport(tuple(out))


def _compose_reciprocal_derivative(b: int) -> Dict[Tuple[int, int], Fraction]:
    """(d/dx)^b rewritten in u = 1/x, as {(power of u, order in d/du): coeff}.

    Uses d/dx = -u^2 d/du and normal ordering d u^p = u^p d + p u^(p-1).
    """
    op = {(0, 0): Fraction(1)}
    for _ in range(b):
        new: Dict[Tuple[int, int], Fraction] = {}
        for (p, k), c in op.items():
            # -u^2 d (u^p d^k) = -p u^(p+1) d^k - u^(p+2) d^(k+1)
            if p:
                new[(p + 1, k)] = new.get((p + 1, k), Fraction(0)) - p * c
            new[(p + 2, k + 1)] = new.get((p + 2, k + 1), Fraction(0)) - c
        op = {key: c for key, c in new.items() if c}
    return op


def reciprocal_transform(ode: LinearODE) -> LinearODE:
    """The ODE satisfied by z(x) = y(1/x).

    Negative powers are cleared by an overall power of x, which is chosen so the
    smallest power present is 0; the overall sign makes the top coefficient of
    the highest derivative positive.
    """
    acc: Dict[Tuple[int, int], Fraction] = {}
    for c, a, b in ode.terms():
        for (p, k), coeff in _compose_reciprocal_derivative(b).items():
            key = (p - a, k)
            acc[key] = acc.get(key, Fraction(0)) + c * coeff
    acc = {key: c for key, c in acc.items() if c}
    min_power = min(p for p, _ in acc)
    order = max(k for _, k in acc)
    polys: List[SparsePoly] = [dict() for _ in range(order + 1)]
    for (p, k), c in acc.items():
        polys[k][p - min_power] = c
    top = polys[order]
    sign = 1 if top[max(top)] > 0 else -1
    polys = [{p: sign * c for p, c in poly.items()} for poly in polys]
    source = None
    if ode.source is not None:
        source = ode.source.reflect().shift(-min_power).scale(sign)
    return LinearODE(tuple(polys), source)


def equivalent_up_to_power(a: LinearODE, b: LinearODE) -> bool:
    """True when a and b differ by an overall factor c * x^k."""
    if a.order != b.order:
        return False
    ta = {(p, k): c for c, p, k in a.terms()}
    tb = {(p, k): c for c, p, k in b.terms()}
    if len(ta) != len(tb):
        return False
    (pa, ka), ca = min(ta.items())
    (pb, kb), cb = min(tb.items())
    if ka != kb:
        return False
    dk, ratio = pb - pa, cb / ca
    if any(tb.get((p + dk, k)) != c * ratio for (p, k), c in ta.items()):
        return False
    if (a.source is None) != (b.source is None):
        return False
    if a.source is not None:
        return a.source.shift(dk).scale(ratio).same_terms(b.source)
    return True
