"""Quasi-exactly solvable potential from a generalized Heun equation.

The equation is

    f'' + {1/(2x) + (1+2s)/(x-1) + 1/(2(x+eps2))} f'
        + (alpha*beta*x - q - Omega/x) / (x(x-1)(x+eps2)) f = 0

with alpha = -5/2 - s, beta = 3/2 - s and q fixed by (s, eps2).  Multiplied by
4x^2(x-1)(x+eps2) it has polynomial coefficients and splits as F(D) + P with
F = -4 eps2 D^2 + 2 eps2 D - 4 Omega and P raising by one and two.

With x = S/(1 + 1/eps2 + S), S = sinh^2(rho y/2), and psi = (1-x)^s f(x), a
polynomial f gives a bound state of energy E = rho^2 (1 - s^2) in the
potential computed by :func:`potential`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .core import GeneralizedSeries, Poly, as_scalar
from .errors import NonRationalIndicialRoot, ResonanceEncountered, SingularPoint
from .normal_form import LinearODE, OperatorSplit, to_operator_form
from .solver import _is_square

NORMALIZABLE = "normalizable"
NON_NORMALIZABLE = "non-normalizable"
NON_POSITIVE_ENERGY = "non-positive-energy"


def _alpha(s):
    return -Fraction(5, 2) - s


def _beta(s):
    return Fraction(3, 2) - s


def _q(s, eps2):
    return (1 - s * s) * (1 + eps2) - Fraction(1, 2) * eps2 * s - Fraction(1, 4) * (1 - 2 * eps2)


@dataclass(frozen=True)
class HeunParams:
    """(eps2, Omega, s) of the equation plus the length scale rho.

    alpha, beta and q are properties so they can never drift from s.
    """

    eps2: Fraction
    Omega: Fraction
    s: Fraction
    rho: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "eps2", as_scalar(self.eps2))
        object.__setattr__(self, "Omega", as_scalar(self.Omega))
        object.__setattr__(self, "s", as_scalar(self.s))
        object.__setattr__(self, "rho", float(self.rho))
        if self.eps2 <= 0:
            raise ValueError("eps2 must be positive")
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    @property
    def alpha(self) -> Fraction:
        return _alpha(self.s)

    @property
    def beta(self) -> Fraction:
        return _beta(self.s)

    @property
    def q(self) -> Fraction:
        return _q(self.s, self.eps2)


@dataclass(frozen=True)
class PotentialSpec:
    rho: float
    eps2: Fraction
    Omega: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps2", as_scalar(self.eps2))
        object.__setattr__(self, "Omega", as_scalar(self.Omega))
        object.__setattr__(self, "rho", float(self.rho))
        if self.eps2 == 0:
            raise ValueError("eps2 must be nonzero")

    @classmethod
    def of(cls, p: HeunParams) -> "PotentialSpec":
        return cls(p.rho, p.eps2, p.Omega)


# --------------------------------------------------------------------------
# Exact side
# --------------------------------------------------------------------------


def _shift_coeffs(eps2, s):
    """(g1, g2): coefficients in s of P x^j = g1(j) x^(j+1) + g2(j) x^(j+2)."""
    ab = _alpha(s) * _beta(s)
    q = _q(s, eps2)

    def g1(j):
        return 4 * (eps2 - 1) * j * (j - 1) + 2 * (3 * eps2 - 2 + 4 * s * eps2) * j - 4 * q

    def g2(j):
        return 4 * j * (j - 1) + 8 * (1 + s) * j + 4 * ab

    return g1, g2


def heun_ode(p: HeunParams) -> LinearODE:
    """The equation times 4x^2(x-1)(x+eps2), as polynomial coefficients."""
    e, s = p.eps2, p.s
    y2 = {2: -4 * e, 3: 4 * (e - 1), 4: 4}
    y1 = {1: -2 * e, 2: 2 * (3 * e - 2 + 4 * s * e), 3: 8 * (1 + s)}
    y0 = {0: -4 * p.Omega, 1: -4 * p.q, 2: 4 * p.alpha * p.beta}
    return LinearODE((y0, y1, y2))


def heun_split(p: HeunParams) -> OperatorSplit:
    return to_operator_form(heun_ode(p), 0)


def omega_term_shift(p: HeunParams) -> int:
    """Exponent shift of the Omega contribution in the multiplied equation.

    Zero means Omega/x^2 sits on the diagonal next to x^2 d^2, so x = 0 stays
    a regular singular point for any Omega.
    """
    with_omega = {(a, b): c for c, a, b in heun_ode(p).terms()}
    without = {(a, b): c for c, a, b in heun_ode(HeunParams(p.eps2, 0, p.s, p.rho)).terms()}
    shifts = {a - b for key in set(with_omega) | set(without) for a, b in [key] if with_omega.get(key) != without.get(key)}
    if not shifts:
        return 0
    return min(shifts)


def indicial_xi(p: HeunParams):
    """(xi_plus, xi_minus), the roots of F(xi) = 0, when rational."""
    disc = 1 - 16 * p.Omega / p.eps2
    root = _is_square(disc)
    if root is None:
        r = complex(float(disc)) ** 0.5
        raise NonRationalIndicialRoot(((1 + r) / 4, (1 - r) / 4))
    return (1 + root) / 4, (1 - root) / 4


def allowed_m(p: HeunParams) -> List[int]:
    """Integer m >= 1 with 2m^2 - m + 2 Omega/eps2 = 0."""
    quad = Poly([2 * p.Omega / p.eps2, -1, 2])
    return [int(r) for r in quad.rational_roots() if r.denominator == 1 and r >= 1]


def heun_recurrence(eps2, Omega, s, m: int, count: int) -> List:
    """a_m .. a_(m+count-1) from F(k) a_k + g1(k-1) a_(k-1) + g2(k-2) a_(k-2) = 0.

    ``s`` may be a rational or a :class:`Poly` in s; a_m = 1.
    """
    eps2, Omega = as_scalar(eps2), as_scalar(Omega)
    g1, g2 = _shift_coeffs(eps2, s)
    one = Poly([1]) if isinstance(s, Poly) else Fraction(1)
    zero = one * 0
    out = [one]
    prev2, prev1 = zero, one
    for k in range(m + 1, m + count):
        Fk = -4 * eps2 * k * k + 2 * eps2 * k - 4 * Omega
        rhs = g1(k - 1) * prev1 + g2(k - 2) * prev2
        if Fk == 0:
            raise ResonanceEncountered(Fraction(k))
        a = rhs * (-1 / Fraction(Fk))
        out.append(a)
        prev2, prev1 = prev1, a
    return out


def termination_quadratic(n: int, s) -> Fraction:
    """s^2 + (2n-1)s + n^2 - n - 15/4: vanishing of the two-step coefficient g2(n-1)."""
    s = as_scalar(s)
    return s * s + (2 * n - 1) * s + n * n - n - Fraction(15, 4)


@dataclass(frozen=True)
class ScanRow:
    n: int
    m: int
    s: Fraction
    energy_ratio: Fraction
    status: str
    f_coeffs: GeneralizedSeries

    @property
    def accepted(self) -> bool:
        return self.status == NORMALIZABLE


def _status(s: Fraction) -> str:
    if s <= 0:
        return NON_NORMALIZABLE
    if s >= 1:
        return NON_POSITIVE_ENERGY
    return NORMALIZABLE


def termination_scan(eps2, n_max: int, Omega=None, m: Optional[int] = None) -> List[ScanRow]:
    """Every rational s for which f terminates at x^(n-1), m < n <= n_max.

    The coefficients a_k are polynomials in s; termination requires
    a_n(s) = a_(n+1)(s) = 0 with a_(n-1)(s) != 0.  Rows with s <= 0 (or
    s >= 1, where E <= 0) are kept and flagged.  Omega defaults to -eps2/2.
    """
    eps2 = as_scalar(eps2)
    Omega = -eps2 / 2 if Omega is None else as_scalar(Omega)
    probe = HeunParams(eps2, Omega, 0)
    ms = [m] if m is not None else allowed_m(probe)
    rows = []
    s_var = Poly.variable()
    for mm in ms:
        if n_max <= mm:
            continue
        a = heun_recurrence(eps2, Omega, s_var, mm, n_max - mm + 2)
        for n in range(mm + 1, n_max + 1):
            an, an1, last = a[n - mm], a[n - mm + 1], a[n - mm - 1]
            common = an.gcd(an1) if not (an.is_zero() and an1.is_zero()) else Poly([0, 1])
            for s in common.rational_roots():
                if last(s) == 0:
                    continue
                coeffs = {mm + k: a[k](s) for k in range(n - mm)}
                f = GeneralizedSeries(coeffs)
                rows.append(ScanRow(n, mm, s, 1 - s * s, _status(s), f))
    rows.sort(key=lambda r: (r.m, r.n, r.s))
    return rows


def energy(s, rho: float) -> float:
    s = as_scalar(s)
    if abs(s) > 1:
        raise ValueError("|s| must not exceed 1")
    return float(rho) ** 2 * float(1 - s * s)


# --------------------------------------------------------------------------
# Numeric side
# --------------------------------------------------------------------------


def _sinh2(y, rho):
    return np.sinh(rho * np.asarray(y, dtype=float) / 2) ** 2


def coordinate_map(y, rho: float, eps2) -> float:
    """x(y) = S / (1 + 1/eps2 + S) with S = sinh^2(rho y / 2)."""
    c = 1 + 1 / float(as_scalar(eps2))
    S = _sinh2(y, rho)
    out = S / (c + S)
    return float(out) if np.ndim(out) == 0 else out


def _one_minus_x(S, eps2):
    c = 1 + 1 / float(eps2)
    return c / (c + S)


def potential(y, spec: PotentialSpec):
    """V(y); diverges like 1/y^2 at the origin when Omega != 0.

    The Omega term enters with coefficient -rho^2 Omega / (eps2 sinh^2), which
    is what the change of variables produces (repulsive for Omega < 0).
    """
    e = float(spec.eps2)
    rho = spec.rho
    S = _sinh2(y, rho)
    if spec.Omega != 0 and np.any(S == 0):
        raise SingularPoint("potential is singular at y = 0 when Omega != 0")
    c = 1 + 1 / e
    bulk = (8 * S**2 - 4 * (5 / e - 1) * S + 2 * (1 / e**2 - 1 / e - 2)) / (8 * (c + S) ** 2)
    if spec.Omega != 0:
        bulk = bulk - float(spec.Omega) / (e * S)
    out = rho**2 * bulk
    return float(out) if np.ndim(out) == 0 else out


def _psi_unnormalized(f_coeffs: GeneralizedSeries, s: Fraction, eps2, rho, y):
    S = _sinh2(y, rho)
    x = S / (1 + 1 / float(eps2) + S)
    fx = np.zeros_like(x)
    for k, a in f_coeffs.items():
        fx = fx + float(a) * x ** float(k)
    return _one_minus_x(S, eps2) ** float(s) * fx


def _trapezoid(values, grid) -> float:
    return float(np.trapezoid(values, grid))


def norm_integral(f_coeffs: GeneralizedSeries, s, eps2, rho: float, upper: float, lower: float = 0.0, h: Optional[float] = None) -> float:
    """Trapezoid integral of the unnormalized psi^2 over [lower, upper]."""
    h = h or 1e-3 / rho
    count = max(int(round((upper - lower) / h)), 2) + 1
    grid = np.linspace(lower, upper, count)
    return _trapezoid(_psi_unnormalized(f_coeffs, as_scalar(s), eps2, rho, grid) ** 2, grid)


def is_normalizable(f_coeffs: GeneralizedSeries, s, eps2, rho: float, delta: float = 1e-3) -> bool:
    """The psi^2 integral settles (relative change < 1e-6 from Y=20/rho to Y=30/rho)."""
    a = norm_integral(f_coeffs, s, eps2, rho, 20 / rho, delta)
    b = norm_integral(f_coeffs, s, eps2, rho, 30 / rho, delta)
    if not (math.isfinite(a) and math.isfinite(b)) or b == 0:
        return False
    return abs(b - a) / abs(b) < 1e-6


def normalization(f_coeffs: GeneralizedSeries, s, eps2, rho: float, tol: float = 1e-12) -> float:
    """N with integral of (N psi)^2 over (0, inf) equal to 1, adaptive upper limit."""
    upper = 20 / rho
    total = norm_integral(f_coeffs, s, eps2, rho, upper)
    while True:
        nxt = upper + 10 / rho
        if rho * nxt / 2 > 700:
            raise ValueError("normalization integral did not settle before sinh overflow")
        more = total + norm_integral(f_coeffs, s, eps2, rho, nxt, upper)
        if abs(more - total) <= tol * abs(more):
            return 1 / math.sqrt(more)
        total, upper = more, nxt


@dataclass(frozen=True)
class QESSolution:
    n: int
    s: Fraction
    E: float
    f_coeffs: GeneralizedSeries
    norm: float
    params: HeunParams


def make_solution(row: ScanRow, eps2, rho: float, Omega=None) -> QESSolution:
    """Numeric bound state from a scan row; refuses rows that are not accepted."""
    eps2 = as_scalar(eps2)
    Omega = -eps2 / 2 if Omega is None else as_scalar(Omega)
    if not row.accepted:
        raise ValueError(f"s = {row.s} is {row.status}")
    params = HeunParams(eps2, Omega, row.s, rho)
    N = normalization(row.f_coeffs, row.s, eps2, rho)
    return QESSolution(row.n, row.s, energy(row.s, rho), row.f_coeffs, N, params)


def qes_solutions(eps2, rho: float, n_max: int, Omega=None) -> List[QESSolution]:
    return [make_solution(r, eps2, rho, Omega) for r in termination_scan(eps2, n_max, Omega) if r.accepted]


def wavefunction(sol: QESSolution, y, p: Optional[HeunParams] = None):
    """psi(y) = N (1-x)^s f(x), x = coordinate_map(y)."""
    p = p or sol.params
    out = sol.norm * _psi_unnormalized(sol.f_coeffs, sol.s, p.eps2, p.rho, y)
    return float(out) if np.ndim(out) == 0 else out


def fd_second_derivative(values, h: float):
    """Centered 5-point second derivative on the interior (two points dropped per end)."""
    v = np.asarray(values, dtype=float)
    if len(v) < 5:
        raise ValueError("need at least 5 grid points")
    return (-v[4:] + 16 * v[3:-1] - 30 * v[2:-2] + 16 * v[1:-3] - v[:-4]) / (12 * h * h)


def _spacing(grid) -> float:
    g = np.asarray(grid, dtype=float)
    steps = np.diff(g)
    h = float(steps.mean())
    if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
        raise ValueError("grid must be uniform and increasing")
    return h


def fd_residual(psi_values, grid, V_values, E: float) -> float:
    """max |-psi'' + V psi - E psi| over the interior of a uniform grid."""
    h = _spacing(grid)
    psi = np.asarray(psi_values, dtype=float)
    V = np.asarray(V_values, dtype=float)
    inner = psi[2:-2]
    return float(np.max(np.abs(-fd_second_derivative(psi, h) + (V[2:-2] - E) * inner)))


def uniform_grid(start: float, stop: float, h: float):
    count = int(round((stop - start) / h)) + 1
    return np.linspace(start, start + (count - 1) * h, count)


def schrodinger_residual(sol: QESSolution, spec: PotentialSpec, grid: Sequence[float], energy_value: Optional[float] = None) -> float:
    """Finite-difference check that psi solves -psi'' + V psi = E psi on ``grid``."""
    g = np.asarray(grid, dtype=float)
    if np.any(g <= 0) and spec.Omega != 0:
        raise SingularPoint("grid must avoid y = 0 when Omega != 0")
    E = sol.E if energy_value is None else float(energy_value)
    p = HeunParams(spec.eps2, spec.Omega, sol.s, spec.rho)
    return fd_residual(wavefunction(sol, g, p), g, potential(g, spec), E)
