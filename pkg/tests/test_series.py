import math
from fractions import Fraction

import pytest

from hypint.exact import ExactComplex
from hypint.lattice import Base, ExponentSet
from hypint.polynomials import CoeffVar, SparsePolynomial
from hypint.series import (CallableOracle, GammaSeries, GammaTerm,
                           SeriesLayout, SeriesPoleError, evaluate_series,
                           expand_general, gg_gamma_coefficient, gg_series,
                           standard_expansion)

A12 = ExponentSet(1, [1, 2])
B1 = Base(A12, (0,))
B2 = Base(A12, (1,))


def ec(x):
    return ExactComplex.from_value(x)


class TestGammaCoefficient:
    def test_linear_base_arguments(self):
        layout = SeriesLayout(A12, B1)
        for m in range(4):
            term = gg_gamma_coefficient((m,), 1, layout)
            assert term.args == (ec(1 + 2 * m),)

    def test_quadratic_base_arguments(self):
        layout = SeriesLayout(A12, B2)
        term0 = gg_gamma_coefficient((0,), 1, layout)
        assert term0.args == (ec(Fraction(1, 2)),)
        term1 = gg_gamma_coefficient((1,), 1, layout)
        assert term1.args == (ec(1),)

    def test_pole_is_flagged(self):
        layout = SeriesLayout(A12, B1)
        term = gg_gamma_coefficient((0,), 0, layout)
        assert term.is_pole()

    def test_affine_shift_law(self):
        # s(m + e_w) - s(m) equals the base coordinates of w, exactly
        A = ExponentSet(2, [(1, 0), (1, 2), (2, 1), (0, 3)])
        for base in [Base(A, (0, 1)), Base(A, (1, 2))]:
            layout = SeriesLayout(A, base)
            width = len(layout.series_vars)
            u = (Fraction(1, 3), Fraction(5, 7))
            for k, var in enumerate(layout.series_vars):
                l = layout.coords(var)
                m = tuple(1 if i == 0 else 0 for i in range(width))
                bumped = tuple(m[i] + (1 if i == k else 0) for i in range(width))
                s_m = gg_gamma_coefficient(m, u, layout).args
                s_b = gg_gamma_coefficient(bumped, u, layout).args
                for j in range(2):
                    assert (s_b[j] - s_m[j]) == ec(l[j])


class TestExpandGeneral:
    def test_order_zero_single_term(self):
        series = gg_series(A12, B1, 1, 0)
        assert len(series.terms) == 1
        assert series.terms[0].m == (0,)

    def test_factorial_weights(self):
        series = gg_series(A12, B1, 1, 2)
        scalars = {t.m: t.scalar for t in series.terms}
        assert scalars[(0,)] == ec(1)
        assert scalars[(1,)] == ec(1)
        assert scalars[(2,)] == ec(Fraction(1, 2))

    def test_callable_oracle_terms(self):
        oracle = CallableOracle(lambda m: (lambda a: 10.0 + m[0]))
        series = expand_general(A12, B1, oracle, 2)
        value, tail = evaluate_series(series, {1: -1.0, 2: 0.5})
        # sum_m (10 + m) 0.5^m / m!
        expected = sum((10 + m) * 0.5 ** m / math.factorial(m) for m in range(3))
        assert value == pytest.approx(expected)

    def test_quadratic_base_slope(self):
        series = gg_series(A12, B2, 1, 1)
        by_m = {t.m: t for t in series.terms}
        assert by_m[(1,)].args == (ec(1),)  # 1/2 + 1/2


class TestEvaluate:
    def test_empty_series(self):
        layout = SeriesLayout(A12, B1)
        value, tail = evaluate_series(GammaSeries(layout, 3, []), {1: -1, 2: 0})
        assert value == 0 and tail == 0

    def test_single_power_term(self):
        layout = SeriesLayout(A12, B1)
        term = GammaTerm((0,), ec(1), (ec(1),))
        series = GammaSeries(layout, 0, [term])
        value, _ = evaluate_series(series, {1: -1.0, 2: 0.0})
        # Gamma(1) * (-a1)^(-1) = 1 at a1 = -1
        assert value == pytest.approx(1.0)

    def test_quadratic_base_value(self):
        series = gg_series(A12, B2, 1, 0)
        value, _ = evaluate_series(series, {1: 0.0, 2: -1.0})
        assert value == pytest.approx(math.sqrt(math.pi))

    def test_zero_base_value_with_negative_exponent(self):
        series = gg_series(A12, B1, 1, 0)
        with pytest.raises(ValueError):
            evaluate_series(series, {1: 0.0, 2: 0.0})

    def test_pole_raises(self):
        series = gg_series(A12, B1, 0, 1)
        with pytest.raises(SeriesPoleError):
            evaluate_series(series, {1: -1.0, 2: 0.1})

    def test_reciprocal_form_is_proportional(self):
        # with an integer slope the reciprocal form differs by a constant
        # and an alternating sign absorbed into the series variable
        direct = gg_series(A12, B1, 1, 5)
        recip = gg_series(A12, B1, 1, 5, form="reciprocal")
        vd, _ = evaluate_series(direct, {1: -1.0, 2: -0.01})
        vr, _ = evaluate_series(recip, {1: -1.0, 2: 0.01})
        # Gamma(1 + 2m) = pi / (sin(pi(1+2m)) Gamma(-2m)) has zero sine;
        # the reciprocal normal form instead pairs with 1/Gamma(-2m) = 0,
        # so every positive-integer argument term vanishes
        assert vr == 0

    def test_reciprocal_form_finite_at_direct_pole(self):
        series = gg_series(A12, B1, 0, 1, form="reciprocal")
        value, _ = evaluate_series(series, {1: -1.0, 2: 0.1})
        # 1/Gamma(1 - 0) = 1 and 1/Gamma(1 - 2) = 0
        assert value == pytest.approx(1.0)

    def test_missing_assignment_rejected(self):
        series = gg_series(A12, B1, 1, 1)
        with pytest.raises(ValueError):
            evaluate_series(series, {1: -1.0})

    def test_tail_is_last_order_magnitude(self):
        series = gg_series(A12, B1, 1, 3)
        a = {1: -1.0, 2: -0.01}
        _, tail = evaluate_series(series, a)
        last = [t for t in series.terms if sum(t.m) == 3]
        expected = abs(complex(last[0].scalar) * math.gamma(7)
                       * (1.0) ** (-7) * (-0.01) ** 3)
        assert tail == pytest.approx(expected)

    def test_linearity_in_terms(self):
        s = gg_series(A12, B1, 1, 4)
        a = {1: -1.2, 2: -0.02}
        full, _ = evaluate_series(s, a)
        layout = s.layout
        parts = 0j
        for t in s.terms:
            single = GammaSeries(layout, 4, [t])
            v, _ = evaluate_series(single, a)
            parts += v
        assert parts == pytest.approx(full)


class TestStandardExpansion:
    @staticmethod
    def gaussian_moments(exponents):
        """Moments of exp(-t^2) on the real line for series variables in
        the given set: the oracle maps the multi-index to the integral of
        t**(sum m_w * w)."""
        members = exponents.members

        def oracle(m):
            k = sum(mw * w[0] for mw, w in zip(m, members))
            if k % 2:
                return 0.0
            return math.gamma((k + 1) / 2)

        return oracle

    def test_order_zero(self):
        P0 = SparsePolynomial(1, {(2,): -1})
        A = ExponentSet(1, [1])
        series = standard_expansion(P0, A, self.gaussian_moments(A), 0)
        value, _ = evaluate_series(series, {1: 0.7})
        assert value == pytest.approx(math.sqrt(math.pi))

    def test_partial_sums_reach_closed_form(self):
        P0 = SparsePolynomial(1, {(2,): -1})
        A = ExponentSet(1, [1])
        series = standard_expansion(P0, A, self.gaussian_moments(A), 20)
        for a in (0.0, 0.3, 0.5):
            value, _ = evaluate_series(series, {1: a})
            expected = math.sqrt(math.pi) * math.exp(a * a / 4)
            assert abs(value - expected) / expected < 1e-8

    def test_quadratic_shift_direction(self):
        # perturbing the quadratic coefficient itself: I(-(1 - a2) t^2)
        P0 = SparsePolynomial(1, {(2,): -1})
        A = ExponentSet(1, [2])
        series = standard_expansion(P0, A, self.gaussian_moments(A), 16)
        a2 = 0.2
        value, _ = evaluate_series(series, {2: a2})
        expected = math.sqrt(math.pi / (1 - a2))
        assert abs(value - expected) / expected < 1e-8

    def test_moment_failure_carries_index(self):
        def broken(m):
            if m[0] == 2:
                raise RuntimeError("boom")
            return 1.0
        with pytest.raises(RuntimeError, match=r"m=\(2,\)"):
            standard_expansion(SparsePolynomial(1, {(2,): -1}),
                               ExponentSet(1, [1]), broken, 3)


def test_series_rejects_terms_beyond_order():
    layout = SeriesLayout(A12, B1)
    term = GammaTerm((5,), ec(1), (ec(1),))
    with pytest.raises(ValueError):
        GammaSeries(layout, 2, [term])


def test_layout_roles():
    layout = SeriesLayout(A12, B1)
    assert layout.role(CoeffVar(0, (1,))) == "base"
    assert layout.role(CoeffVar(0, (2,))) == "series"
    with pytest.raises(KeyError):
        layout.role(CoeffVar(0, (3,)))
