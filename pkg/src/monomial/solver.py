"""Series solutions of [F(D) + P] y = Q by the alternating cascade.

Homogeneous case, starting from an indicial exponent ``lam`` (``F(lam) = 0``)::

    t_0 = x**lam,    t_{m+1} = -F^{-1} P t_m,    y = sum_m t_m

With a source the cascade starts from ``u_0 = F^{-1} Q`` instead.  Each partial
sum ``S_M`` obeys ``(F + P) S_M - Q = P t_M``, which is what
:func:`verify_residual_symbolic` exposes.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .core import (
    ASCENDING,
    DESCENDING,
    DiagonalOp,
    GeneralizedSeries,
    MixedOp,
    apply_inverse_diagonal,
    apply_mixed,
    as_scalar,
    format_scalar,
)
from .errors import DepthExhausted, MonomialError
from .normal_form import LinearODE, OperatorSplit

log = logging.getLogger(__name__)

DEFAULT_DEPTH = 64
DEFAULT_FRONTIER = Fraction(128)


def default_depth() -> int:
    raw = os.environ.get("MONOMIAL_DEPTH")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            log.warning("ignoring non-integer MONOMIAL_DEPTH=%r", raw)
        else:
            if value >= 1:
                return value
            log.warning("ignoring MONOMIAL_DEPTH=%r (must be >= 1)", raw)
    return DEFAULT_DEPTH


@dataclass(frozen=True)
class SolveConfig:
    """Truncation of the cascade.

    ``direction=None`` infers it from P (raising -> ascending).  With
    ``strict`` set, running out of depth before the cascade terminates or
    reaches the frontier raises :class:`DepthExhausted`; otherwise the partial
    sum is returned with an honest frontier.
    """

    max_depth: int = field(default_factory=default_depth)
    frontier_bound: Fraction = DEFAULT_FRONTIER
    direction: Optional[str] = None
    strict: bool = False

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        object.__setattr__(self, "frontier_bound", as_scalar(self.frontier_bound))
        if self.frontier_bound <= 0:
            raise ValueError("frontier_bound must be positive")


@dataclass(frozen=True)
class Solution:
    lam: Fraction
    series: Optional[GeneralizedSeries]
    terminated: bool
    depth_used: int
    error: Optional[MonomialError] = None
    has_source: bool = False

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class IrrationalRoots:
    degree: int
    discriminant: Optional[Fraction]
    approximations: tuple

    def describe(self) -> str:
        approx = ", ".join(f"{z.real:.12g}" + (f"{z.imag:+.12g}j" if abs(z.imag) > 1e-14 else "") for z in self.approximations)
        if self.discriminant is not None:
            return f"degree {self.degree}, discriminant {format_scalar(self.discriminant)}, roots ~ {approx}"
        return f"degree {self.degree}, roots ~ {approx}"


@dataclass(frozen=True)
class IndicialData:
    rational_roots: tuple
    irrational_root_report: Optional[IrrationalRoots] = None


def _is_square(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def indicial_roots(F: DiagonalOp) -> IndicialData:
    if F.is_zero():
        raise ValueError("the zero operator has no indicial equation")
    roots = set(F.rational_roots())
    rest = DiagonalOp(F.coeffs)
    for r in roots:
        while rest.degree >= 1 and rest(r) == 0:
            rest = rest.divmod(DiagonalOp([-r, 1]))[0]
    if rest.degree == 2:
        c, b, a = rest.coeffs
        disc = b * b - 4 * a * c
        sq = _is_square(disc)
        if sq is not None:
            # unreachable for a deflated polynomial, kept as the exact quadratic check
            roots.update({(-b + sq) / (2 * a), (-b - sq) / (2 * a)})
            rest = DiagonalOp([1])
        else:
            approx = tuple(complex(z) for z in np.roots([float(a), float(b), float(c)]))
            return IndicialData(tuple(sorted(roots)), IrrationalRoots(2, disc, approx))
    report = None
    if rest.degree >= 1:
        approx = tuple(complex(z) for z in np.roots([float(c) for c in reversed(rest.coeffs)]))
        report = IrrationalRoots(rest.degree, None, approx)
    return IndicialData(tuple(sorted(roots)), report)


def _direction(P: MixedOp, cfg: SolveConfig) -> str:
    if P.mixed:
        raise ValueError("P mixes raising and lowering terms; the cascade needs a single direction")
    if cfg.direction is not None:
        return cfg.direction
    return DESCENDING if P.lowering else ASCENDING


def cascade(F: DiagonalOp, P: MixedOp, start: GeneralizedSeries, depth: int) -> Iterator[GeneralizedSeries]:
    """Yield t_0 = start, t_1, ..., t_depth with t_{m+1} = -F^{-1} P t_m.

    No truncation beyond what ``start`` carries; stops early once a term is
    exactly zero.
    """
    t = start
    yield t
    for _ in range(depth):
        t = -apply_inverse_diagonal(F, apply_mixed(P, t))
        yield t
        if t.is_zero():
            return


def _tighter(a: Optional[Fraction], b: Optional[Fraction], direction: str) -> Optional[Fraction]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b) if direction == ASCENDING else max(a, b)


def _clip(s: GeneralizedSeries, frontier: Fraction):
    """Exact series of the terms of ``s`` up to ``frontier``, plus a dropped flag."""
    kept = s.with_frontier(frontier).exact()
    return kept, len(kept) != len(s)


def _run(split: OperatorSplit, start: GeneralizedSeries, anchor: Fraction, cfg: SolveConfig):
    direction = start.direction
    sign = 1 if direction == ASCENDING else -1
    limit = _tighter(anchor + sign * cfg.frontier_bound, start.frontier, direction)
    t, truncated = _clip(start.exact(), limit)
    truncated = truncated or start.frontier is not None
    total = t
    depth = 0
    terminated = t.is_zero()
    saturated = False
    while not terminated and depth < cfg.max_depth:
        depth += 1
        raw = apply_mixed(split.P, t)
        if raw.is_zero():
            terminated = True
            break
        kept, dropped = _clip(raw, limit)
        truncated = truncated or dropped
        if kept.is_zero():
            saturated = True
            break
        t = -apply_inverse_diagonal(split.F, kept)
        total = total + t
    frontier = limit if truncated else None
    if not (terminated or saturated):
        tail = apply_mixed(split.P, t)
        if tail.is_zero():
            terminated = True
            depth += 1
        elif _clip(tail, limit)[0].is_zero():
            frontier = limit
        else:
            if cfg.strict:
                raise DepthExhausted(cfg.max_depth)
            # the neglected tail begins where P t_M begins; all before it is exact
            edge = tail.lowest() if direction == ASCENDING else tail.highest()
            cand = edge - sign
            inside = [e for e in total.terms if sign * (e - edge) < 0]
            if inside:
                last = max(inside) if direction == ASCENDING else min(inside)
                cand = max(cand, last) if direction == ASCENDING else min(cand, last)
            frontier = _tighter(limit if truncated else None, cand, direction)
    series = GeneralizedSeries(total.terms, frontier, direction)
    return series, terminated, depth


def _closes(split: OperatorSplit, series: GeneralizedSeries, source: Optional[GeneralizedSeries] = None) -> bool:
    """True when the stored terms alone solve the equation exactly.

    With two or more shift sizes in P a finite solution can arise from
    cancellation between cascade terms, so no single t_m ever vanishes.
    """
    residual = split.apply(series.exact())
    if source is not None:
        residual = residual - source.exact()
    return residual.is_zero()


def solve_homogeneous(split: OperatorSplit, lam, cfg: Optional[SolveConfig] = None) -> Solution:
    cfg = cfg or SolveConfig()
    lam = as_scalar(lam)
    if split.F(lam) != 0:
        raise ValueError(f"{format_scalar(lam)} is not a root of F(D) = {split.F.pretty()}")
    direction = _direction(split.P, cfg)
    start = GeneralizedSeries.monomial(lam, 1, direction=direction)
    series, terminated, depth = _run(split, start, lam, cfg)
    if not terminated and _closes(split, series):
        series, terminated = series.exact(), True
    return Solution(lam, series, terminated, depth)


class SolutionSet(list):
    """A list of :class:`Solution` that also carries the indicial analysis."""

    def __init__(self, items=(), indicial: Optional[IndicialData] = None):
        super().__init__(items)
        self.indicial = indicial


def solve_all(split: OperatorSplit, cfg: Optional[SolveConfig] = None) -> SolutionSet:
    cfg = cfg or SolveConfig()
    data = indicial_roots(split.F)
    out = []
    for lam in data.rational_roots:
        try:
            out.append(solve_homogeneous(split, lam, cfg))
        except MonomialError as exc:
            out.append(Solution(lam, None, False, 0, error=exc))
    return SolutionSet(out, data)


def solve_with_source(split: OperatorSplit, cfg: Optional[SolveConfig] = None) -> Solution:
    cfg = cfg or SolveConfig()
    if split.scaled_source is None:
        raise ValueError("split carries no source term")
    Q = split.scaled_source
    direction = _direction(split.P, cfg) if split.P.terms else (cfg.direction or Q.direction)
    if Q.is_zero():
        return Solution(Fraction(0), GeneralizedSeries.zero(Q.frontier, direction), True, 0, has_source=True)
    Q = GeneralizedSeries(Q.terms, Q.frontier if Q.direction == direction else None, direction)
    u0 = apply_inverse_diagonal(split.F, Q)
    anchor = u0.leading()[0] if u0 else Fraction(0)
    series, terminated, depth = _run(split, u0, anchor, cfg)
    if not terminated and Q.frontier is None and _closes(split, series, Q):
        series, terminated = series.exact(), True
    return Solution(anchor, series, terminated, depth, has_source=True)


def verify_residual_symbolic(split: OperatorSplit, sol: Solution) -> GeneralizedSeries:
    """(F + P) y - Q on the stored terms of ``sol``, returned exactly.

    For a terminated solution this is the zero series.  Otherwise every
    surviving term sits past ``sol.series.frontier``.
    """
    y = sol.series.exact()
    out = split.apply(y)
    if sol.has_source and split.scaled_source is not None:
        Q = split.scaled_source
        if sol.series.frontier is not None:
            Q = GeneralizedSeries(Q.terms, sol.series.frontier, sol.series.direction)
        out = out - Q.exact()
    return out


def residual_beyond_frontier(residual: GeneralizedSeries, sol: Solution) -> bool:
    f = sol.series.frontier
    if f is None:
        return residual.is_zero()
    if sol.series.direction == ASCENDING:
        return all(e > f for e in residual.terms)
    return all(e < f for e in residual.terms)


def evaluate_series(sol, x0: float, derivative: int = 0) -> float:
    """Double-precision value of the stored terms (of a Solution or a series)."""
    series = sol.series if isinstance(sol, Solution) else sol
    if series is None:
        raise ValueError("solution has no series")
    return series.evaluate(float(x0), derivative)


def residual_numeric(ode: LinearODE, sol: Solution, points: Sequence[float]) -> float:
    """max over points of |sum_b p_b(x) y^(b)(x) - Q(x)|."""
    worst = 0.0
    derivs = [sol.series.exact().derivative(b) for b in range(ode.order + 1)]
    for x0 in points:
        x0 = float(x0)
        coeffs = ode.evaluate_coefficients(x0)
        total = sum(p * d.evaluate(x0) for p, d in zip(coeffs, derivs))
        if ode.source is not None:
            total -= ode.source.evaluate(x0)
        worst = max(worst, abs(total))
    return worst
