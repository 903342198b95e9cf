from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monomial.core import (
    ASCENDING,
    DESCENDING,
    DiagonalOp,
    GeneralizedSeries,
    MixedOp,
    OpTerm,
    Poly,
    apply_diagonal,
    apply_inverse_diagonal,
    apply_mixed,
    apply_op_term,
    as_scalar,
    falling_factorial,
    format_scalar,
    rational_roots,
)
from monomial.errors import NegativeBaseFractionalPower, ResonanceEncountered

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
exponents = st.fractions(min_value=-8, max_value=8, max_denominator=6)


def series_strategy(direction=ASCENDING):
    return st.dictionaries(exponents, rationals.filter(bool), max_size=6).map(
        lambda d: GeneralizedSeries(d, direction=direction)
    )


class TestScalars:
    def test_accepts_exact_inputs(self):
        assert as_scalar(3) == 3
        assert as_scalar("-6/4") == Fraction(-3, 2)
        assert as_scalar(Fraction(1, 7)) == Fraction(1, 7)

    @pytest.mark.parametrize("bad", [0.5, True, None, [1]])
    def test_rejects_inexact_inputs(self, bad):
        with pytest.raises(TypeError):
            as_scalar(bad)

    def test_format(self):
        assert format_scalar(Fraction(6, 4)) == "3/2"
        assert format_scalar(Fraction(-4, 2)) == "-2"
        assert format_scalar(0) == "0"

    def test_falling_factorial(self):
        assert falling_factorial(5, 0) == 1
        assert falling_factorial(5, 3) == 60
        assert falling_factorial(Fraction(1, 2), 2) == Fraction(-1, 4)


class TestPoly:
    def test_arithmetic(self):
        p = Poly([1, 1])  # 1 + t
        assert p * p == Poly([1, 2, 1])
        assert (p * p - p).coeffs == (0, 1, 1)
        assert 2 - p == Poly([1, -1])
        assert p**3 == Poly([1, 3, 3, 1])

    def test_divmod_and_gcd(self):
        a = Poly.from_roots([1, 2, Fraction(1, 3)])
        b = Poly.from_roots([2, 5])
        q, r = a.divmod(b)
        assert q * b + r == a
        assert a.gcd(b) == Poly([-2, 1])

    def test_falling(self):
        assert Poly.falling(3) == Poly([0, 2, -3, 1])

    def test_rational_roots(self):
        assert rational_roots([-1, 0, 4]) == [Fraction(-1, 2), Fraction(1, 2)]
        assert Poly([-2, 0, 1]).rational_roots() == []
        assert Poly.from_roots([0, 0, Fraction(-3, 4), 2]).rational_roots() == [Fraction(-3, 4), 0, 2]

    @given(st.lists(st.fractions(min_value=-6, max_value=6, max_denominator=5), min_size=1, max_size=4))
    @settings(max_examples=60, deadline=None)
    def test_rational_roots_recovers_constructed_roots(self, roots):
        assert Poly.from_roots(roots, lead=Fraction(3, 7)).rational_roots() == sorted(set(roots))

    def test_pretty(self):
        assert DiagonalOp([4, -2]).pretty() == "-2*D + 4"
        assert DiagonalOp([0, 0, 1]).pretty() == "D^2"


class TestSeries:
    def test_beyond_frontier_terms_are_dropped(self):
        s = GeneralizedSeries({0: 1, 2: 3, 5: 7}, frontier=2)
        assert s.exponents() == [0, 2]
        d = GeneralizedSeries({0: 1, -2: 3, -5: 7}, frontier=-2, direction=DESCENDING)
        assert d.exponents() == [0, -2]

    def test_zero_coefficients_vanish(self):
        assert GeneralizedSeries({1: 0}).is_zero()

    def test_addition_takes_the_tighter_frontier(self):
        a = GeneralizedSeries({0: 1, 3: 1}, frontier=4)
        b = GeneralizedSeries({1: 1}, frontier=2)
        c = a + b
        assert c.frontier == 2
        assert c.exponents() == [0, 1]

    def test_exact_plus_truncated(self):
        c = GeneralizedSeries({0: 1, 9: 1}) + GeneralizedSeries({1: 1}, frontier=3)
        assert c.frontier == 3 and 9 not in c.terms

    def test_opposite_truncated_directions_refuse_to_mix(self):
        a = GeneralizedSeries({0: 1}, frontier=1)
        b = GeneralizedSeries({0: 1}, frontier=-1, direction=DESCENDING)
        with pytest.raises(ValueError):
            a + b

    def test_leading_follows_direction(self):
        assert GeneralizedSeries({1: 2, 3: 5}).leading() == (1, 2)
        assert GeneralizedSeries({1: 2, 3: 5}, direction=DESCENDING).leading() == (3, 5)

    def test_shift_and_reflect(self):
        s = GeneralizedSeries({Fraction(1, 2): 1}, frontier=2)
        assert s.shift(1).exponents() == [Fraction(3, 2)] and s.shift(1).frontier == 3
        r = s.reflect()
        assert r.direction == DESCENDING and r.frontier == -2 and r.exponents() == [Fraction(-1, 2)]

    def test_derivative(self):
        s = GeneralizedSeries({3: 1, 0: 5})
        assert s.derivative().same_terms(GeneralizedSeries({2: 3}))
        assert s.derivative(2).same_terms(GeneralizedSeries({1: 6}))

    def test_evaluate(self):
        s = GeneralizedSeries({0: 1, 2: Fraction(-1, 2)})
        assert s.evaluate(2.0) == -1.0
        assert s.evaluate(2.0, 1) == -2.0

    def test_fractional_power_of_negative_base(self):
        s = GeneralizedSeries({Fraction(1, 2): 1})
        with pytest.raises(NegativeBaseFractionalPower):
            s.evaluate(-1.0)
        assert GeneralizedSeries({3: 1}).evaluate(-2.0) == -8.0

    def test_equality_includes_frontier(self):
        a = GeneralizedSeries({0: 1}, frontier=2)
        assert a != GeneralizedSeries({0: 1}, frontier=3)
        assert a.same_terms(GeneralizedSeries({0: 1}))
        assert hash(a) == hash(GeneralizedSeries({0: 1}, frontier=2))

    @given(series_strategy(), series_strategy())
    def test_addition_commutes(self, a, b):
        assert a + b == b + a

    @given(series_strategy())
    def test_reflect_is_an_involution(self, s):
        assert s.reflect().reflect() == s


class TestOperators:
    def test_opterm_validation(self):
        with pytest.raises(ValueError):
            OpTerm(1, 2, 2)
        with pytest.raises(ValueError):
            OpTerm(0, 1, 0)
        with pytest.raises(ValueError):
            OpTerm(1, -1, 0)
        assert OpTerm(3, 1, 3).shift == -2

    def test_mixedop_merges_duplicates(self):
        P = MixedOp([(1, 2, 0), (2, 2, 0), (-3, 2, 0), (1, 0, 2)])
        assert [(t.c, t.i, t.j) for t in P.terms] == [(1, 0, 2)]
        assert P.lowering and not P.raising and not P.mixed
        assert MixedOp([(1, 1, 0), (1, 0, 1)]).mixed

    def test_mixedop_pretty(self):
        assert MixedOp([(4, 2, 0), (-2, 3, 1)]).pretty() == "4*x^2 - 2*x^3*d"

    def test_op_term_on_monomial(self):
        # x^2 d^3 x^5 = 60 x^4
        out = apply_op_term(OpTerm(1, 2, 3), GeneralizedSeries.monomial(5))
        assert dict(out.terms) == {4: 60}

    def test_op_term_moves_frontier(self):
        out = apply_op_term(OpTerm(1, 2, 0), GeneralizedSeries({0: 1}, frontier=3))
        assert out.frontier == 5

    def test_apply_mixed_accumulates(self):
        P = MixedOp([(1, 1, 0), (1, 2, 1)])  # x + x^2 d
        out = apply_mixed(P, GeneralizedSeries.monomial(2))
        assert dict(out.terms) == {3: 3}

    def test_diagonal_on_monomials(self):
        F = DiagonalOp([-2, 0, 1])
        out = apply_diagonal(F, GeneralizedSeries({3: 1, Fraction(1, 2): 4}))
        assert dict(out.terms) == {3: 7, Fraction(1, 2): -7}

    def test_inverse_diagonal_resonance(self):
        F = DiagonalOp.from_roots([2])
        with pytest.raises(ResonanceEncountered) as info:
            apply_inverse_diagonal(F, GeneralizedSeries({1: 1, 2: 1}))
        assert info.value.exponent == 2

    @given(series_strategy(), st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), max_size=3))
    def test_inverse_undoes_diagonal(self, s, roots):
        F = DiagonalOp(Poly.from_roots([r + Fraction(1, 97) for r in roots], lead=2))
        assert apply_inverse_diagonal(F, apply_diagonal(F, s)) == s

    @given(exponents, st.integers(0, 4))
    def test_euler_powers_match_falling_factorial(self, mu, b):
        """x^b d^b acts on x^mu as the falling factorial mu^(b)."""
        F = DiagonalOp(Poly.falling(b))
        out = apply_diagonal(F, GeneralizedSeries.monomial(mu))
        assert out[mu] == falling_factorial(mu, b)
