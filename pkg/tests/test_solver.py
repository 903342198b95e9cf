from fractions import Fraction

import pytest

from monomial.core import DESCENDING, DiagonalOp, GeneralizedSeries, MixedOp, OpTerm
from monomial.errors import DepthExhausted, ResonanceEncountered
from monomial.normal_form import LinearODE, OperatorSplit, to_operator_form
from monomial.solver import (
    SolveConfig,
    cascade,
    default_depth,
    evaluate_series,
    indicial_roots,
    residual_beyond_frontier,
    residual_numeric,
    solve_all,
    solve_homogeneous,
    solve_with_source,
    verify_residual_symbolic,
)

HERMITE2 = LinearODE(({0: 4}, {1: -2}, {0: 1}))
BESSEL_HALF = LinearODE(({0: Fraction(-1, 4), 2: 1}, {1: 1}, {2: 1}))


class TestHomogeneous:
    def test_hermite_terminates(self):
        sol = solve_homogeneous(to_operator_form(HERMITE2, 0), 2)
        assert sol.terminated and sol.depth_used == 2
        assert dict(sol.series.terms) == {2: 1, 0: Fraction(-1, 2)}
        assert sol.series.frontier is None and sol.series.direction == DESCENDING

    def test_hermite_shift_two_gives_both_parities(self):
        sols = solve_all(to_operator_form(HERMITE2, 2))
        assert [s.lam for s in sols] == [0, 1]
        even, odd = sols
        assert even.terminated and dict(even.series.terms) == {0: 1, 2: -2}
        assert not odd.terminated
        # odd solution: a_(k+2) = 2(k - 2) a_k / ((k+2)(k+1))
        assert odd.series[1] == 1 and odd.series[3] == Fraction(-1, 3) and odd.series[5] == Fraction(-1, 30)

    def test_legendre(self):
        ode = LinearODE(({0: 6}, {1: -2}, {0: 1, 2: -1}))
        sol = solve_homogeneous(to_operator_form(ode, 0), 2)
        assert dict(sol.series.normalized().terms) == {2: 1, 0: Fraction(-1, 3)}

    def test_bessel_depth_and_frontier(self):
        split = to_operator_form(BESSEL_HALF, 0)
        sol = solve_homogeneous(split, Fraction(1, 2), SolveConfig(max_depth=3))
        assert not sol.terminated and sol.depth_used == 3
        s = sol.series
        assert s[Fraction(5, 2)] / s[Fraction(1, 2)] == Fraction(-1, 6)
        assert s[Fraction(9, 2)] == Fraction(1, 120)
        assert s.frontier == Fraction(15, 2)
        res = verify_residual_symbolic(split, sol)
        assert res.exponents() == [Fraction(17, 2)]
        assert residual_beyond_frontier(res, sol)

    def test_strict_mode_raises(self):
        split = to_operator_form(BESSEL_HALF, 0)
        with pytest.raises(DepthExhausted):
            solve_homogeneous(split, Fraction(1, 2), SolveConfig(max_depth=3, strict=True))

    def test_frontier_bound_saturates(self):
        split = to_operator_form(BESSEL_HALF, 0)
        sol = solve_homogeneous(split, Fraction(1, 2), SolveConfig(max_depth=50, frontier_bound=6))
        assert sol.series.frontier == Fraction(13, 2)
        assert sol.series.highest() == Fraction(13, 2)
        assert residual_beyond_frontier(verify_residual_symbolic(split, sol), sol)

    def test_resonance(self):
        # Bessel nu = 1: second root -1 hits F(1) = 0 after one step
        ode = LinearODE(({0: -1, 2: 1}, {1: 1}, {2: 1}))
        split = to_operator_form(ode, 0)
        with pytest.raises(ResonanceEncountered):
            solve_homogeneous(split, -1)
        sols = solve_all(split)
        assert not sols[0].ok and isinstance(sols[0].error, ResonanceEncountered)
        assert sols[1].ok

    def test_not_a_root(self):
        with pytest.raises(ValueError):
            solve_homogeneous(to_operator_form(HERMITE2, 0), 3)

    def test_mixed_direction_rejected(self):
        split = OperatorSplit(DiagonalOp([0, 1]), MixedOp([(1, 1, 0), (1, 0, 2)]))
        with pytest.raises(ValueError):
            solve_homogeneous(split, 0)

    def test_env_depth(self, monkeypatch):
        monkeypatch.setenv("MONOMIAL_DEPTH", "5")
        assert default_depth() == 5
        assert SolveConfig().max_depth == 5
        monkeypatch.setenv("MONOMIAL_DEPTH", "junk")
        assert default_depth() == 64

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            SolveConfig(max_depth=0)
        with pytest.raises(ValueError):
            SolveConfig(frontier_bound=0)

    def test_cascade_generator(self):
        split = to_operator_form(HERMITE2, 0)
        ts = list(cascade(split.F, split.P, GeneralizedSeries.monomial(2, direction=DESCENDING), 10))
        assert len(ts) == 3 and ts[-1].is_zero()


class TestIndicial:
    def test_rational(self):
        data = indicial_roots(DiagonalOp([2, 2, -4]))
        assert data.rational_roots == (Fraction(-1, 2), 1)
        assert data.irrational_root_report is None

    def test_irrational_quadratic(self):
        data = indicial_roots(DiagonalOp([-2, 0, 1]))
        assert data.rational_roots == ()
        rep = data.irrational_root_report
        assert rep.degree == 2 and rep.discriminant == 8
        assert sorted(round(z.real, 9) for z in rep.approximations) == [-1.414213562, 1.414213562]

    def test_mixed_cubic(self):
        # (D - 1)(D^2 - 3)
        data = indicial_roots(DiagonalOp([3, -3, -1, 1]))
        assert data.rational_roots == (1,)
        assert data.irrational_root_report.degree == 2

    def test_double_root_reported_once(self):
        assert indicial_roots(DiagonalOp.from_roots([2, 2])).rational_roots == (2,)


class TestSource:
    SPLIT = OperatorSplit(DiagonalOp([Fraction(-1, 2), 1]), MixedOp([OpTerm(1, 1, 0)]), 0, GeneralizedSeries.monomial(0))

    def test_example(self):
        sol = solve_with_source(self.SPLIT, SolveConfig(max_depth=2))
        assert [sol.series[k] for k in range(3)] == [-2, 4, Fraction(-8, 3)]
        res = verify_residual_symbolic(self.SPLIT, sol)
        assert dict(res.terms) == {3: Fraction(-8, 3)}
        assert sol.series.frontier == 2

    def test_numeric_residual_small_near_origin(self):
        ode = LinearODE(({0: Fraction(-1, 2), 1: 1}, {1: 1}), GeneralizedSeries.monomial(0))
        sol = solve_with_source(self.SPLIT, SolveConfig(max_depth=30))
        assert residual_numeric(ode, sol, [0.1, 0.3, 0.5]) < 1e-12
        assert abs(evaluate_series(sol, 0.0) + 2) < 1e-15

    def test_zero_source(self):
        split = OperatorSplit(DiagonalOp([1, 1]), MixedOp([OpTerm(1, 1, 0)]), 0, GeneralizedSeries())
        sol = solve_with_source(split)
        assert sol.terminated and sol.series.is_zero()

    def test_requires_source(self):
        with pytest.raises(ValueError):
            solve_with_source(to_operator_form(HERMITE2, 0))

    def test_source_resonance(self):
        # (D - 1) y = x has no power-series particular solution
        split = OperatorSplit(DiagonalOp([-1, 1]), MixedOp([OpTerm(1, 2, 0)]), 0, GeneralizedSeries.monomial(1))
        with pytest.raises(ResonanceEncountered):
            solve_with_source(split)

    def test_polynomial_particular_solution_terminates(self):
        # (D + 1) y + d y = 1  ->  y = 1 exactly since d 1 = 0
        split = OperatorSplit(DiagonalOp([1, 1]), MixedOp([OpTerm(1, 0, 1)]), 0, GeneralizedSeries.monomial(0))
        sol = solve_with_source(split)
        assert sol.terminated and dict(sol.series.terms) == {0: 1}
        assert verify_residual_symbolic(split, sol).is_zero()
