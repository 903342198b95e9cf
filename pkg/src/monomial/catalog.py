"""Named equations, their textbook series, and a cascade-vs-textbook check.

The oracles here use the classical explicit sums (Rodrigues-type closed forms,
Pochhammer ratios) and never call the solver, so :func:`compare` is a genuine
two-route check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from .core import (
    ASCENDING,
    DESCENDING,
    GeneralizedSeries,
    Poly,
    as_scalar,
    format_scalar,
)
from .errors import MissingParameter, MonomialError, UnknownFamily
from .normal_form import LinearODE, reciprocal_transform, to_operator_form
from .solver import SolveConfig, Solution, solve_homogeneous, solve_with_source

POLYNOMIAL_FAMILIES = (
    "hermite",
    "legendre",
    "gegenbauer",
    "chebyshev_t",
    "chebyshev_u",
    "jacobi",
    "laguerre",
)


def pochhammer(a, k: int) -> Fraction:
    out = Fraction(1)
    a = as_scalar(a)
    for j in range(k):
        out *= a + j
    return out


def binom(z, k: int) -> Fraction:
    """Generalized binomial coefficient C(z, k) for rational z."""
    if k < 0:
        return Fraction(0)
    out = Fraction(1)
    z = as_scalar(z)
    for j in range(k):
        out *= z - j
    return out / math.factorial(k)


def cos_poly(order: int) -> Dict[int, Fraction]:
    """Taylor polynomial of cos x through x**order."""
    return {2 * k: Fraction((-1) ** k, math.factorial(2 * k)) for k in range(order // 2 + 1)}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: Mapping[str, Fraction]
    ode: LinearODE
    recommended_shift: int
    indicial_lambda: Fraction
    prefactor: Optional[str] = None
    route: str = "direct"
    has_source: bool = False


@dataclass(frozen=True)
class Family:
    required: Tuple[str, ...]
    defaults: Mapping[str, Fraction] = field(default_factory=dict)
    build: Callable = None
    oracle: Callable = None
    default_order: Callable = None
    summary: str = ""


# --------------------------------------------------------------------------
# ODE builders
# --------------------------------------------------------------------------


def _ode(*polys, source=None) -> LinearODE:
    return LinearODE(tuple(polys), source)


def _hermite(p):
    n = p["n"]
    return _ode({0: 2 * n}, {1: -2}, {0: 1}), 0, n, None


def _legendre(p):
    n = p["n"]
    return _ode({0: n * (n + 1)}, {1: -2}, {0: 1, 2: -1}), 0, n, None


def _assoc_legendre(p):
    n, m = p["n"], p["m"]
    if not 0 <= m <= n:
        raise ValueError("associated Legendre needs 0 <= m <= n")
    ode = _ode({0: (n - m) * (n + m + 1)}, {1: -2 * (m + 1)}, {0: 1, 2: -1})
    return ode, 0, n - m, f"(1 - x^2)^({format_scalar(Fraction(m, 2))})"


def _bessel(p):
    nu = p["nu"]
    return _ode({0: -nu * nu, 2: 1}, {1: 1}, {2: 1}), 0, nu, None


def _gen_bessel_a(p) -> Fraction:
    return p["beta"] * p["nu"] - p["alpha"]


def _generalized_bessel(p):
    beta, gamma, nu = p["beta"], p["gamma"], p["nu"]
    if beta <= 0 or (2 * beta).denominator != 1:
        raise ValueError("generalized Bessel needs 2*beta to be a positive integer")
    a = _gen_bessel_a(p)
    branch = 1 if p["branch"] > 0 else -1
    power = int(2 * beta)
    y0 = {0: a * a - nu * nu * beta * beta}
    y0[power] = y0.get(power, Fraction(0)) + beta * beta * gamma * gamma
    ode = _ode(y0, {1: 1 - 2 * a}, {2: 1})
    return ode, 0, a + branch * beta * nu, None


def _gegenbauer(p):
    n, lam = p["n"], p["lam"]
    return _ode({0: n * (n + 2 * lam)}, {1: -(2 * lam + 1)}, {0: 1, 2: -1}), 0, n, None


def _cheb_t(p):
    n = p["n"]
    return _ode({0: n * n}, {1: -1}, {0: 1, 2: -1}), 0, n, None


def _cheb_u(p):
    n = p["n"]
    return _ode({0: n * (n + 2)}, {1: -3}, {0: 1, 2: -1}), 0, n, None


def _jacobi(p):
    n, a, b = p["n"], p["alpha"], p["beta"]
    ode = _ode({0: n * (n + a + b + 1)}, {0: b - a, 1: -(a + b + 2)}, {0: 1, 2: -1})
    return ode, 0, n, None


def _laguerre(p):
    n, a = p["n"], p["alpha"]
    return _ode({0: n}, {0: a + 1, 1: -1}, {1: 1}), 0, n, None


def _hypergeometric(p):
    a, b, c = p["alpha"], p["beta"], p["gamma"]
    ode = _ode({0: -a * b}, {0: c, 1: -(a + b + 1)}, {1: 1, 2: -1})
    return ode, 0, -a, None


def _lommel(p):
    mu, nu = p["mu"], p["nu"]
    src = GeneralizedSeries.monomial(mu + 1)
    return _ode({0: -nu * nu, 2: 1}, {1: 1}, {2: 1}, source=src), 0, mu + 1, None


def _neumann(p):
    n = p["n"]
    # x cos^2(n pi/2) + n sin^2(n pi/2) at integer n
    src = GeneralizedSeries.monomial(1) if n % 2 == 0 else GeneralizedSeries.monomial(0, n)
    return _ode({0: 1 - n * n, 2: 1}, {1: 3}, {2: 1}, source=src), 0, None, None


def _periodic(p):
    a, lam, order = p["a"], p["lam"], int(p["order"])
    if lam not in (0, 1):
        raise ValueError("periodic family takes lam = 0 or 1")
    y0 = {k: a * c for k, c in cos_poly(order).items()}
    return _ode(y0, {}, {0: 1}), 2, lam, None


# --------------------------------------------------------------------------
# Oracles
# --------------------------------------------------------------------------


def _finite(terms: Dict[Fraction, Fraction], kmax: int, order: int, exps: List[Fraction], direction: str):
    frontier = None if order >= kmax else exps[order]
    return GeneralizedSeries(terms, frontier, direction)


def _descending_poly(n: int, order: int, coeff: Callable[[int], Fraction]):
    kmax = n // 2
    terms, exps = {}, []
    for k in range(kmax + 1):
        e = Fraction(n - 2 * k)
        exps.append(e)
        if k <= order:
            terms[e] = coeff(k)
    return _finite(terms, kmax, order, exps, DESCENDING)


def _o_hermite(p, order):
    n = int(p["n"])
    return _descending_poly(
        n, order, lambda k: Fraction((-1) ** k * math.factorial(n) * 2 ** (n - 2 * k), math.factorial(k) * math.factorial(n - 2 * k))
    )


def _legendre_coeff(n: int, k: int) -> Fraction:
    return Fraction((-1) ** k * math.comb(n, k) * math.comb(2 * n - 2 * k, n), 2**n)


def _o_legendre(p, order):
    n = int(p["n"])
    return _descending_poly(n, order, lambda k: _legendre_coeff(n, k))


def _o_assoc_legendre(p, order):
    n, m = int(p["n"]), int(p["m"])
    poly = GeneralizedSeries({n - 2 * k: _legendre_coeff(n, k) for k in range(n // 2 + 1)}, direction=DESCENDING)
    series = poly.derivative(m)
    exps = series.exponents()
    kmax = len(exps) - 1
    terms = {e: series[e] for e in exps[: order + 1]}
    return _finite(terms, kmax, order, exps, DESCENDING)


def _o_bessel(p, order):
    nu = p["nu"]
    terms = {nu + 2 * k: Fraction((-1) ** k, math.factorial(k) * 4**k) / pochhammer(nu + 1, k) for k in range(order + 1)}
    return GeneralizedSeries(terms, nu + 2 * order, ASCENDING)


def _o_generalized_bessel(p, order):
    beta, gamma, nu = p["beta"], p["gamma"], p["nu"]
    branch = 1 if p["branch"] > 0 else -1
    lam = _gen_bessel_a(p) + branch * beta * nu
    q = gamma * gamma / 4
    terms = {
        lam + 2 * beta * k: (-q) ** k / (math.factorial(k) * pochhammer(1 + branch * nu, k)) for k in range(order + 1)
    }
    return GeneralizedSeries(terms, lam + 2 * beta * order, ASCENDING)


def _o_gegenbauer(p, order):
    n, lam = int(p["n"]), p["lam"]
    return _descending_poly(
        n, order, lambda k: (-1) ** k * pochhammer(lam, n - k) * 2 ** (n - 2 * k) / (math.factorial(k) * math.factorial(n - 2 * k))
    )


def _o_cheb_t(p, order):
    n = int(p["n"])
    if n == 0:
        return GeneralizedSeries({0: 1}, direction=DESCENDING)
    return _descending_poly(
        n,
        order,
        lambda k: Fraction(n * (-1) ** k * math.factorial(n - k - 1) * 2 ** (n - 2 * k), 2 * math.factorial(k) * math.factorial(n - 2 * k)),
    )


def _o_cheb_u(p, order):
    n = int(p["n"])
    return _descending_poly(
        n, order, lambda k: Fraction((-1) ** k * math.factorial(n - k) * 2 ** (n - 2 * k), math.factorial(k) * math.factorial(n - 2 * k))
    )


def _o_jacobi(p, order):
    n, a, b = int(p["n"]), p["alpha"], p["beta"]
    xm = Poly([Fraction(-1, 2), Fraction(1, 2)])
    xp = Poly([Fraction(1, 2), Fraction(1, 2)])
    total = Poly()
    for s in range(n + 1):
        total = total + binom(n + a, n - s) * binom(n + b, s) * xm**s * xp ** (n - s)
    series = GeneralizedSeries(dict(enumerate(total.coeffs)), direction=DESCENDING)
    exps = series.exponents()
    return _finite({e: series[e] for e in exps[: order + 1]}, len(exps) - 1, order, exps, DESCENDING)


def _o_laguerre(p, order):
    n, a = int(p["n"]), p["alpha"]
    terms = {k: (-1) ** k * binom(n + a, n - k) / math.factorial(k) for k in range(n + 1)}
    series = GeneralizedSeries(terms, direction=DESCENDING)
    exps = series.exponents()
    return _finite({e: series[e] for e in exps[: order + 1]}, len(exps) - 1, order, exps, DESCENDING)


def _o_hypergeometric(p, order):
    a, b, c = p["alpha"], p["beta"], p["gamma"]
    terms = {
        -a - k: pochhammer(a, k) * pochhammer(a - c + 1, k) / (pochhammer(a - b + 1, k) * math.factorial(k))
        for k in range(order + 1)
    }
    return GeneralizedSeries(terms, -a - order, DESCENDING)


def _o_lommel(p, order):
    mu, nu = p["mu"], p["nu"]
    terms, denom = {}, Fraction(1)
    for k in range(order + 1):
        denom *= (mu + 2 * k + 1) ** 2 - nu * nu
        terms[mu + 1 + 2 * k] = (-1) ** k / denom
    return GeneralizedSeries(terms, mu + 1 + 2 * order, ASCENDING)


def _o_neumann(p, order):
    n = int(p["n"])
    if n == 0:
        return GeneralizedSeries({-1: 1}, direction=DESCENDING)
    terms = {}
    for k in range(n // 2 + 1):
        c = Fraction(n * math.factorial(n - k - 1) * 2 ** (n - 2 * k + 1), 4 * math.factorial(k))
        terms[-(n - 2 * k + 1)] = c
    return GeneralizedSeries(terms, direction=DESCENDING)


def _o_periodic(p, order):
    return periodic_sum_formula(p["a"], p["lam"], int(p["order"]))


def periodic_sum_formula(a, lam, order: int) -> GeneralizedSeries:
    """Closed multi-sum for y'' + a cos(x) y = 0 around x**lam, lam in {0, 1}.

    Sums over m >= 0 and ordered tuples (n_1..n_m) of cos-series indices; the
    coefficient of x^(2(m + sum n) + lam) collects

        (-a)^m * prod (-1)^n_i / (2 n_i)!
               * prod_r (2 A_r)! / (2 A_r + 2)!,
        A_r = m + lam/2 - r + n_1 + ... + n_(m+1-r)

    Terms with exponent above ``order`` are not generated.
    """
    a = as_scalar(a)
    lam = as_scalar(lam)
    if lam not in (0, 1):
        raise ValueError("lam must be 0 or 1")
    terms: Dict[Fraction, Fraction] = {}
    budget = (order - lam) / 2  # m + sum(n_i) may not exceed this

    def tuples(m: int, room: int):
        if m == 0:
            yield ()
            return
        for first in range(room + 1):
            for rest in tuples(m - 1, room - first):
                yield (first,) + rest

    m = 0
    while m <= budget:
        for ns in tuples(m, int(budget - m)):
            c = (-a) ** m
            for n_i in ns:
                c *= Fraction((-1) ** n_i, math.factorial(2 * n_i))
            for r in range(1, m + 1):
                two_a = 2 * (m - r + sum(ns[: m + 1 - r])) + lam
                c *= Fraction(math.factorial(int(two_a)), math.factorial(int(two_a) + 2))
            e = 2 * (m + sum(ns)) + lam
            terms[e] = terms.get(e, Fraction(0)) + c
        m += 1
    return GeneralizedSeries(terms, order, ASCENDING)


def _poly_order(p):
    return int(p["n"])


FAMILIES: Dict[str, Family] = {
    "hermite": Family(("n",), {}, _hermite, _o_hermite, _poly_order, "H_n, y'' - 2xy' + 2ny = 0"),
    "legendre": Family(("n",), {}, _legendre, _o_legendre, _poly_order, "P_n"),
    "associated_legendre": Family(("n", "m"), {}, _assoc_legendre, _o_assoc_legendre, _poly_order, "P_n^m series factor"),
    "bessel": Family(("nu",), {}, _bessel, _o_bessel, lambda p: 7, "J_nu"),
    "generalized_bessel": Family(
        ("alpha", "beta", "gamma", "nu"), {"branch": Fraction(1)}, _generalized_bessel, _o_generalized_bessel, lambda p: 7,
        "x^a J_(+-nu)(gamma x^beta), a = beta nu - alpha",
    ),
    "gegenbauer": Family(("n", "lam"), {}, _gegenbauer, _o_gegenbauer, _poly_order, "C_n^lam"),
    "chebyshev_t": Family(("n",), {}, _cheb_t, _o_cheb_t, _poly_order, "T_n"),
    "chebyshev_u": Family(("n",), {}, _cheb_u, _o_cheb_u, _poly_order, "U_n"),
    "jacobi": Family(("n", "alpha", "beta"), {}, _jacobi, _o_jacobi, _poly_order, "P_n^(alpha,beta)"),
    "laguerre": Family(("n",), {"alpha": Fraction(0)}, _laguerre, _o_laguerre, _poly_order, "L_n^(alpha)"),
    "hypergeometric": Family(
        ("alpha", "beta", "gamma"), {}, _hypergeometric, _o_hypergeometric, lambda p: 7, "descending solution x^-alpha 2F1(.., 1/x)"
    ),
    "lommel": Family(("mu", "nu"), {}, _lommel, _o_lommel, lambda p: 7, "s_(mu,nu), Bessel operator with source x^(mu+1)"),
    "neumann": Family(("n",), {}, _neumann, _o_neumann, lambda p: int(p["n"]) // 2, "O_n, polynomial in 1/x"),
    "periodic": Family(
        ("a", "lam"), {"order": Fraction(10)}, _periodic, _o_periodic, lambda p: int(p["order"]), "y'' + a cos(x) y = 0"
    ),
}

SOURCE_FAMILIES = ("lommel", "neumann")


def families() -> List[str]:
    return sorted(FAMILIES)


def _resolve(name: str, params: Mapping) -> Tuple[Family, Dict[str, Fraction]]:
    try:
        fam = FAMILIES[name]
    except KeyError:
        raise UnknownFamily(name) from None
    full = {k: as_scalar(v) for k, v in fam.defaults.items()}
    full.update({k: as_scalar(v) for k, v in params.items()})
    for key in fam.required:
        if key not in full:
            raise MissingParameter(key)
    for key in ("n", "m", "order"):
        if key in full and full[key].denominator != 1:
            raise ValueError(f"{key} must be an integer")
    return fam, full


def build(name: str, params: Optional[Mapping] = None, **kw) -> CatalogEntry:
    fam, full = _resolve(name, {**(params or {}), **kw})
    ode, shift, lam, prefactor = fam.build(full)
    route = "reciprocal" if name == "neumann" else "direct"
    return CatalogEntry(
        name, full, ode, shift, None if lam is None else as_scalar(lam), prefactor, route, name in SOURCE_FAMILIES
    )


def oracle_coefficients(name: str, params: Optional[Mapping] = None, order: Optional[int] = None, **kw) -> GeneralizedSeries:
    fam, full = _resolve(name, {**(params or {}), **kw})
    if order is None:
        order = fam.default_order(full)
    if order < 0:
        raise ValueError("order must be >= 0")
    return fam.oracle(full, order)


@dataclass(frozen=True)
class ComparisonReport:
    name: str
    order: int
    match: bool
    mismatch: Optional[Tuple[Fraction, Fraction, Fraction]] = None
    error: Optional[str] = None
    route: str = "direct"
    direct_error: Optional[str] = None
    compared_terms: int = 0

    def lines(self) -> List[str]:
        out = [f"family: {self.name}", f"order: {self.order}", f"route: {self.route}", f"match: {str(self.match).lower()}"]
        out.append(f"compared terms: {self.compared_terms}")
        if self.mismatch is not None:
            e, want, got = self.mismatch
            out.append(f"first mismatch: exponent {format_scalar(e)}, expected {format_scalar(want)}, got {format_scalar(got)}")
        if self.direct_error:
            out.append(f"direct route: {self.direct_error}")
        if self.error:
            out.append(f"error: {self.error}")
        return out


def _err(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def solve_entry(entry: CatalogEntry, cfg: Optional[SolveConfig] = None) -> Solution:
    """Run the cascade for a catalog entry along its recommended route."""
    cfg = cfg or SolveConfig()
    ode = reciprocal_transform(entry.ode) if entry.route == "reciprocal" else entry.ode
    split = to_operator_form(ode, entry.recommended_shift)
    if entry.name == "periodic":
        bound = int(entry.params["order"]) - entry.indicial_lambda
        cfg = SolveConfig(cfg.max_depth, max(bound, Fraction(1)), cfg.direction, cfg.strict)
    if entry.has_source:
        return solve_with_source(split, cfg)
    return solve_homogeneous(split, entry.indicial_lambda, cfg)


def _common_frontier(a: GeneralizedSeries, b: GeneralizedSeries):
    fs = [s.frontier for s in (a, b) if s.frontier is not None]
    if not fs:
        return None
    return min(fs) if a.direction == ASCENDING else max(fs)


def compare_series(expected: GeneralizedSeries, got: GeneralizedSeries):
    """(match, first mismatch, number of compared exponents) within both frontiers."""
    frontier = _common_frontier(expected, got)
    keys = set(expected.terms) | set(got.terms)
    if frontier is not None:
        if expected.direction == ASCENDING:
            keys = {e for e in keys if e <= frontier}
        else:
            keys = {e for e in keys if e >= frontier}
    for e in sorted(keys, reverse=expected.direction == DESCENDING):
        if expected[e] != got[e]:
            return False, (e, expected[e], got[e]), len(keys)
    return True, None, len(keys)


def compare(name: str, params: Optional[Mapping] = None, cfg: Optional[SolveConfig] = None, order: Optional[int] = None, **kw) -> ComparisonReport:
    """Solve a catalog equation by the cascade and check it against its oracle.

    Homogeneous families are compared after scaling both sides to a unit
    leading coefficient; source families are compared as they come, since the
    particular solution is pinned down by the source.
    """
    cfg = cfg or SolveConfig()
    fam, full = _resolve(name, {**(params or {}), **kw})
    if order is None:
        order = fam.default_order(full)
    entry = build(name, full)
    direct_error = None
    if entry.route == "reciprocal":
        try:
            direct = to_operator_form(entry.ode, entry.recommended_shift)
            solve_with_source(direct, cfg)
        except MonomialError as exc:
            direct_error = _err(exc)
    try:
        sol = solve_entry(entry, cfg)
    except (MonomialError, ValueError) as exc:
        return ComparisonReport(name, order, False, error=_err(exc), route=entry.route, direct_error=direct_error)
    expected = oracle_coefficients(name, full, order)
    if entry.route == "reciprocal":
        expected = expected.reflect()
    got = sol.series
    if not entry.has_source:
        expected, got = expected.normalized(), got.normalized()
    ok, mismatch, count = compare_series(expected, got)
    return ComparisonReport(name, order, ok, mismatch, None, entry.route, direct_error, count)
