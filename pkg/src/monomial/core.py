"""Exact series and the two operator species acting on them.

Everything here works over :class:`fractions.Fraction`.  A series is a finite
map ``exponent -> coefficient`` together with a *frontier*: the last exponent
that is known exactly.  Terms past the frontier are untracked and never stored.

Operators come in two kinds:

* :class:`DiagonalOp` -- a polynomial ``F`` in the Euler operator ``D = x d/dx``.
  It multiplies ``x**mu`` by ``F(mu)``.
* :class:`MixedOp` -- a sum of :class:`OpTerm` ``c * x**i * (d/dx)**j`` with
  ``i != j``; each term moves exponents by ``i - j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from .errors import NegativeBaseFractionalPower, ResonanceEncountered

ASCENDING = "ascending"
DESCENDING = "descending"

Scalar = Fraction


def as_scalar(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: every quantity in the exact layer must be rational.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


def format_scalar(value: Fraction) -> str:
    """``"p/q"`` in lowest terms, or just ``"p"`` when the denominator is 1."""
    value = as_scalar(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def falling_factorial(mu, j: int) -> Fraction:
    """mu (mu-1) ... (mu-j+1); the empty product is 1."""
    mu = as_scalar(mu)
    out = Fraction(1)
    for k in range(j):
        out *= mu - k
    return out


# --------------------------------------------------------------------------
# Univariate polynomials with rational coefficients
# --------------------------------------------------------------------------


class Poly:
    """Dense univariate polynomial, coefficients stored low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        if isinstance(coeffs, Poly):
            coeffs = coeffs.coeffs
        cs = [as_scalar(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def variable(cls):
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1):
        out = cls([lead])
        for r in roots:
            out = out * cls([-as_scalar(r), 1])
        return out

    @classmethod
    def falling(cls, b: int):
        """The polynomial t(t-1)...(t-b+1)."""
        return cls.from_roots(range(b))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc if self.coeffs else Fraction(0)

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        return type(self)([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return type(self)([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return type(self)([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = as_scalar(other)
            return type(self)([c * a for a in self.coeffs])
        if self.is_zero() or other.is_zero():
            return type(self)()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return type(self)(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_scalar(other)
        return type(self)([a / c for a in self.coeffs])

    def __pow__(self, n: int):
        out = type(self)([1])
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        try:
            return self.coeffs == Poly([other]).coeffs
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"{type(self).__name__}({[format_scalar(c) for c in self.coeffs]})"

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(len(rem) - other.degree, 1)
        lead = other.lead()
        while len(rem) - 1 >= other.degree and any(rem):
            shift = len(rem) - 1 - other.degree
            factor = rem[-1] / lead
            quot[shift] = factor
            for k, c in enumerate(other.coeffs):
                rem[shift + k] -= factor * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return type(self)(quot), type(self)(rem)

    def monic(self):
        return self / self.lead() if self.coeffs else self

    def gcd(self, other: "Poly"):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def derivative(self):
        return type(self)([k * c for k, c in enumerate(self.coeffs)][1:])

    def rational_roots(self) -> list:
        """Distinct rational roots in ascending order (rational root theorem)."""
        return rational_roots(self.coeffs)

    def pretty(self, var: str = "D") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = format_scalar(mag)
            else:
                mono = var if k == 1 else f"{var}^{k}"
                body = mono if mag == 1 else f"{format_scalar(mag)}*{mono}"
            parts.append((sign, body))
        head_sign, head = parts[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def _divisors(n: int) -> list:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(coeffs: Sequence) -> list:
    cs = [as_scalar(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) <= 1:
        return []
    roots = set()
    # x = 0 is a root exactly when the constant term vanishes
    low = 0
    while cs[low] == 0:
        low += 1
    if low:
        roots.add(Fraction(0))
    cs = cs[low:]
    scale = math.lcm(*(c.denominator for c in cs))
    ints = [int(c * scale) for c in cs]
    g = math.gcd(*ints)
    ints = [k // g for k in ints]
    poly = Poly(ints)
    for p in _divisors(ints[0]):
        for q in _divisors(ints[-1]):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand not in roots and poly(cand) == 0:
                    roots.add(cand)
    return sorted(roots)


class DiagonalOp(Poly):
    """A polynomial F(D) in the Euler operator; diagonal on monomials."""

    __slots__ = ()

    def pretty(self, var: str = "D") -> str:
        return super().pretty(var)


def eval_diagonal(F: DiagonalOp, mu) -> Fraction:
    """F(mu): the eigenvalue of F(D) on x**mu."""
    return Fraction(F(as_scalar(mu)))


# --------------------------------------------------------------------------
# Generalized series
# --------------------------------------------------------------------------


def _beyond(e: Fraction, frontier: Optional[Fraction], direction: str) -> bool:
    if frontier is None:
        return False
    return e > frontier if direction == ASCENDING else e < frontier


class GeneralizedSeries:
    """Sparse series sum(c_e * x**e) over rational exponents ``e``.

    ``frontier`` is the last exponent known exactly; ``None`` means the series
    is exact (a finite sum, nothing truncated).  For an ascending series the
    untracked region is ``e > frontier``, for a descending one ``e < frontier``.
    Terms landing in the untracked region are discarded on construction.
    """

    __slots__ = ("_terms", "frontier", "direction")

    def __init__(
        self,
        terms: Optional[Mapping] = None,
        frontier=None,
        direction: str = ASCENDING,
    ):
        if direction not in (ASCENDING, DESCENDING):
            raise ValueError(f"direction must be {ASCENDING!r} or {DESCENDING!r}")
        self.direction = direction
        self.frontier = None if frontier is None else as_scalar(frontier)
        clean = {}
        for e, c in (terms or {}).items():
            e, c = as_scalar(e), as_scalar(c)
            if c != 0 and not _beyond(e, self.frontier, direction):
                clean[e] = clean.get(e, Fraction(0)) + c
        self._terms = MappingProxyType({e: c for e, c in clean.items() if c != 0})

    # construction helpers -------------------------------------------------

    @classmethod
    def monomial(cls, exponent, coeff=1, frontier=None, direction=ASCENDING):
        return cls({exponent: coeff}, frontier, direction)

    @classmethod
    def zero(cls, frontier=None, direction=ASCENDING):
        return cls({}, frontier, direction)

    def with_frontier(self, frontier, direction: Optional[str] = None):
        return GeneralizedSeries(self._terms, frontier, direction or self.direction)

    def exact(self) -> "GeneralizedSeries":
        """The stored terms, read as an exact finite sum."""
        return GeneralizedSeries(self._terms, None, self.direction)

    def truncate(self, frontier) -> "GeneralizedSeries":
        """Keep terms up to ``frontier``; the tighter of the two frontiers wins."""
        frontier = as_scalar(frontier)
        if self.frontier is not None and _beyond(frontier, self.frontier, self.direction):
            frontier = self.frontier
        return GeneralizedSeries(self._terms, frontier, self.direction)

    # mapping protocol -----------------------------------------------------

    @property
    def terms(self) -> Mapping[Fraction, Fraction]:
        return self._terms

    def exponents(self) -> list:
        return sorted(self._terms, reverse=self.direction == DESCENDING)

    def items(self) -> Iterator[Tuple[Fraction, Fraction]]:
        for e in self.exponents():
            yield e, self._terms[e]

    def __iter__(self):
        return iter(self.exponents())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __getitem__(self, exponent) -> Fraction:
        return self._terms.get(as_scalar(exponent), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def leading(self) -> Tuple[Fraction, Fraction]:
        """(exponent, coefficient) of the first term in series order."""
        if not self._terms:
            raise ValueError("zero series has no leading term")
        e = min(self._terms) if self.direction == ASCENDING else max(self._terms)
        return e, self._terms[e]

    def lowest(self) -> Fraction:
        return min(self._terms)

    def highest(self) -> Fraction:
        return max(self._terms)

    # arithmetic -----------------------------------------------------------

    def _merge_meta(self, other: "GeneralizedSeries"):
        if self.frontier is None and other.frontier is None:
            return None, self.direction
        if self.frontier is None:
            return other.frontier, other.direction
        if other.frontier is None:
            return self.frontier, self.direction
        if self.direction != other.direction:
            raise ValueError("cannot combine truncated series of opposite directions")
        pick = min if self.direction == ASCENDING else max
        return pick(self.frontier, other.frontier), self.direction

    def __add__(self, other):
        if not isinstance(other, GeneralizedSeries):
            return NotImplemented
        frontier, direction = self._merge_meta(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return GeneralizedSeries(terms, frontier, direction)

    def __neg__(self):
        return GeneralizedSeries({e: -c for e, c in self._terms.items()}, self.frontier, self.direction)

    def __sub__(self, other):
        if not isinstance(other, GeneralizedSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "GeneralizedSeries":
        c = as_scalar(c)
        return GeneralizedSeries({e: c * a for e, a in self._terms.items()}, self.frontier, self.direction)

    def __mul__(self, c):
        if isinstance(c, GeneralizedSeries):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def shift(self, k) -> "GeneralizedSeries":
        """Multiply by x**k."""
        k = as_scalar(k)
        frontier = None if self.frontier is None else self.frontier + k
        return GeneralizedSeries({e + k: c for e, c in self._terms.items()}, frontier, self.direction)

    def reflect(self) -> "GeneralizedSeries":
        """Substitute x -> 1/x: exponents flip sign and the direction reverses."""
        direction = DESCENDING if self.direction == ASCENDING else ASCENDING
        frontier = None if self.frontier is None else -self.frontier
        return GeneralizedSeries({-e: c for e, c in self._terms.items()}, frontier, direction)

    def derivative(self, order: int = 1) -> "GeneralizedSeries":
        out = self
        for _ in range(order):
            out = apply_op_term(OpTerm(Fraction(1), 0, 1), out)
        return out

    def normalized(self) -> "GeneralizedSeries":
        """Rescale so the leading coefficient is 1."""
        if not self._terms:
            return self
        return self.scale(1 / self.leading()[1])

    def same_terms(self, other: "GeneralizedSeries") -> bool:
        return dict(self._terms) == dict(other._terms)

    def __eq__(self, other):
        if not isinstance(other, GeneralizedSeries):
            return NotImplemented
        return (
            dict(self._terms) == dict(other._terms)
            and self.frontier == other.frontier
            and (self.direction == other.direction or self.frontier is None)
        )

    def __hash__(self):
        return hash((tuple(sorted(self._terms.items())), self.frontier))

    def evaluate(self, x0: float, derivative: int = 0) -> float:
        """Sum the stored terms at ``x0`` in double precision."""
        s = self.derivative(derivative) if derivative else self
        total = 0.0
        for e, c in s.items():
            if e.denominator != 1:
                if x0 < 0:
                    raise NegativeBaseFractionalPower(
                        f"x0={x0} raised to fractional exponent {format_scalar(e)}"
                    )
                total += float(c) * x0 ** float(e)
            else:
                total += float(c) * x0 ** int(e)
        return total

    def __repr__(self):
        body = " + ".join(f"({format_scalar(c)})x^{format_scalar(e)}" for e, c in self.items()) or "0"
        if self.frontier is not None:
            marker = ">" if self.direction == ASCENDING else "<"
            body += f" + O(x^{marker}{format_scalar(self.frontier)})"
        return f"GeneralizedSeries[{body}]"


# --------------------------------------------------------------------------
# Off-diagonal operator terms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OpTerm:
    """``c * x**i * (d/dx)**j`` with ``i != j``."""

    c: Fraction
    i: int
    j: int

    def __post_init__(self):
        object.__setattr__(self, "c", as_scalar(self.c))
        if self.c == 0:
            raise ValueError("OpTerm coefficient must be nonzero")
        if self.i < 0 or self.j < 0:
            raise ValueError("OpTerm powers must be non-negative")
        if self.i == self.j:
            raise ValueError("x^i d^i terms are diagonal; fold them into F(D)")

    @property
    def shift(self) -> int:
        return self.i - self.j

    def __str__(self):
        parts = []
        if self.i:
            parts.append("x" if self.i == 1 else f"x^{self.i}")
        if self.j:
            parts.append("d" if self.j == 1 else f"d^{self.j}")
        mono = "*".join(parts)
        if self.c == 1:
            return mono
        if self.c == -1:
            return "-" + mono
        return f"{format_scalar(self.c)}*{mono}"


class MixedOp:
    """A sum of :class:`OpTerm`, one per (i, j) pair."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable = ()):
        acc = {}
        for t in terms:
            if not isinstance(t, OpTerm):
                t = OpTerm(*t)
            acc[(t.i, t.j)] = acc.get((t.i, t.j), Fraction(0)) + t.c
        self.terms: Tuple[OpTerm, ...] = tuple(
            OpTerm(c, i, j) for (i, j), c in sorted(acc.items()) if c != 0
        )

    def shifts(self) -> set:
        return {t.shift for t in self.terms}

    @property
    def raising(self) -> bool:
        return bool(self.terms) and all(t.shift > 0 for t in self.terms)

    @property
    def lowering(self) -> bool:
        return bool(self.terms) and all(t.shift < 0 for t in self.terms)

    @property
    def mixed(self) -> bool:
        """True when both raising and lowering terms are present."""
        return bool(self.terms) and not (self.raising or self.lowering)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other):
        if not isinstance(other, MixedOp):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return f"MixedOp({[str(t) for t in self.terms]})"

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        text = str(self.terms[0])
        for t in self.terms[1:]:
            s = str(t)
            text += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
        return text


def apply_op_term(t: OpTerm, s: GeneralizedSeries) -> GeneralizedSeries:
    out = {}
    for mu, a in s.terms.items():
        c = a * t.c * falling_factorial(mu, t.j)
        if c:
            e = mu + t.shift
            out[e] = out.get(e, Fraction(0)) + c
    frontier = None if s.frontier is None else s.frontier + t.shift
    return GeneralizedSeries(out, frontier, s.direction)


def apply_mixed(P: MixedOp, s: GeneralizedSeries) -> GeneralizedSeries:
    """P applied to s, contributions at shared exponents accumulated."""
    out = {}
    frontier = None
    pick = min if s.direction == ASCENDING else max
    for t in P.terms:
        part = apply_op_term(t, s)
        for e, c in part.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        if part.frontier is not None:
            frontier = part.frontier if frontier is None else pick(frontier, part.frontier)
    return GeneralizedSeries(out, frontier, s.direction)


def apply_diagonal(F: DiagonalOp, s: GeneralizedSeries) -> GeneralizedSeries:
    return GeneralizedSeries({mu: a * F(mu) for mu, a in s.terms.items()}, s.frontier, s.direction)


def apply_inverse_diagonal(F: DiagonalOp, s: GeneralizedSeries) -> GeneralizedSeries:
    out = {}
    for mu in s.exponents():
        value = F(mu)
        if value == 0:
            raise ResonanceEncountered(mu)
        out[mu] = s.terms[mu] / value
    return GeneralizedSeries(out, s.frontier, s.direction)
