import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf

from altlattice.expr import parse_const_expr
from altlattice.numerics import ConsistencyError, DomainError, PrecisionContext
from altlattice.sums import (
    Method,
    SumSpec,
    csch_terms,
    eval_csch,
    eval_naive,
    eval_product,
    normalize,
)
from conftest import agree

EQ_1_1 = "-pi/(5*sqrt(5))*log(sqrt(5)+1-sqrt(5+2*sqrt(5))) + pi/25*log(11+5*sqrt(5))"

# csch values at 30 digits; the float64 double sum reproduces each to ~1e-16
FROZEN = [
    (3, 1, "1", "0.2661570018716375625964155"),
    (7, 2, "2", "0.06776309709505002396285321"),
    (8, 3, "1", "0.0001688272980888381840100622"),
    (5, 1, "2", "0.6810607668914133376639861"),
    (6, 1, "1", "0.2720288653521495304547545"),
    (10, 1, "1", "0.2720290549817657002772823"),
    (4, 1, "5", "0.8636927894775034029434287"),
]


def spec(a, b, x):
    return SumSpec(a, b, parse_const_expr(x))


class TestSumSpec:
    def test_rejects_common_factor_with_hint(self):
        with pytest.raises(DomainError, match="common factor"):
            SumSpec(4, 2, 1)

    @pytest.mark.parametrize("a", [1, 0, -3])
    def test_rejects_small_a(self, a):
        with pytest.raises(DomainError):
            SumSpec(a, 1, 1)

    @pytest.mark.parametrize("x", [0, -1, Fraction(-1, 2)])
    def test_rejects_nonpositive_x(self, x):
        with pytest.raises(DomainError):
            SumSpec(3, 1, x)

    def test_rejects_negative_expression_x(self):
        with pytest.raises(DomainError):
            SumSpec(3, 1, parse_const_expr("1-sqrt(2)"))

    def test_accepts_expression_x(self):
        assert SumSpec(4, 1, parse_const_expr("4/sqrt(7)")).a == 4


class TestNormalize:
    @pytest.mark.parametrize("a,b,expected", [
        (5, 4, (1, -1)), (5, -1, (1, 1)), (2, 1, (1, 1)), (7, 9, (2, -1)), (7, -12, (2, 1)), (10, 13, (3, -1)),
    ])
    def test_cases(self, a, b, expected):
        canonical, sign = normalize(SumSpec(a, b, 1))
        assert (canonical.b, sign) == expected

    def test_five_four_numerically(self):
        ctx = PrecisionContext(20)
        with ctx.workdps():
            assert agree(eval_csch(SumSpec(5, 4, 1), ctx).value, -eval_csch(SumSpec(5, 1, 1), ctx).value, 20)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 12), st.integers(-40, 40), st.sampled_from(["1/2", "1", "3"]))
    def test_symmetry_preserves_value(self, a, b, x):
        if math.gcd(a, b) != 1:
            return
        ctx = PrecisionContext(30)
        s = spec(a, b, x)
        canonical, sign = normalize(s)
        assert 1 <= canonical.b <= a / 2
        with ctx.workdps():
            assert abs(sign * eval_csch(canonical, ctx).value - eval_csch(s, ctx).value) < ctx.tau * 10


class TestCsch:
    def test_eq_1_1(self, ctx50):
        with ctx50.workdps():
            rhs = parse_const_expr(EQ_1_1).evaluate(ctx50)
            assert agree(eval_csch(SumSpec(5, 1, 5), ctx50).value, rhs, 50)

    def test_two_one_vanishes(self, ctx50):
        assert abs(eval_csch(SumSpec(2, 1, 3), ctx50).value) < ctx50.tau

    def test_lemniscatic_four_one(self, ctx50):
        with ctx50.workdps():
            r = mpmath.root(2, 8)
            expected = mpmath.pi / (8 * mpmath.sqrt(2)) * mpmath.log((r + 1) / (r - 1))
            assert agree(eval_csch(SumSpec(4, 1, 8), ctx50).value, expected, 50)

    def test_fifteen_terms_each_side_suffice(self):
        ctx = PrecisionContext(100)
        s = SumSpec(5, 1, 1)
        with ctx.workdps():
            window = mpmath.fsum(csch_terms(s, range(-15, 16), ctx))
            assert abs(window - eval_csch(s, ctx).value) < mpf(10) ** -100

    def test_huge_argument_does_not_overflow(self, ctx50):
        v = eval_csch(SumSpec(3, 1, mpf("1e-3")), ctx50).value
        assert 0 <= v < mpf(10) ** -1000

    @pytest.mark.parametrize("a,b,x,value", FROZEN)
    def test_frozen_values(self, a, b, x, value):
        ctx = PrecisionContext(25)
        assert agree(eval_csch(spec(a, b, x), ctx).value, value, 25)

    def test_limits_in_x(self):
        # F rises from 0 at x -> 0+ towards sum (-1)^n/(an+b)^2 as x -> infinity
        ctx = PrecisionContext(20)
        xs = ["0.1", "0.5", "1", "2", "5", "20", "100"]
        for a in range(3, 11):
            for b in range(1, a // 2 + 1):
                if math.gcd(a, b) != 1:
                    continue
                with ctx.workdps():
                    limit = mpmath.nsum(lambda n: (-1) ** int(n) / (a * n + b) ** 2, [-mpmath.inf, mpmath.inf])
                    values = [eval_csch(SumSpec(a, b, mpf(x)), ctx).value for x in xs]
                    assert abs(values[0]) < mpf(10) ** -10
                    gaps = [abs(limit - v) for v in values]
                    assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
                    assert gaps[-1] < mpf(10) ** -4


class TestProduct:
    @pytest.mark.parametrize("a,b,x", [(3, 1, "1"), (7, 2, "2"), (5, 1, "5"), (9, 4, "1/2"), (10, 3, "sqrt(2)")])
    def test_matches_csch(self, a, b, x, ctx50):
        s = spec(a, b, x)
        assert agree(eval_product(s, ctx50).value, eval_csch(s, ctx50).value, 50)

    def test_two_one_cancels(self, ctx50):
        assert abs(eval_product(SumSpec(2, 1, 1), ctx50).value) < ctx50.tau

    def test_work_counts_factors(self, ctx50):
        small = eval_product(SumSpec(3, 1, 1), ctx50).work
        large = eval_product(SumSpec(9, 1, 1), ctx50).work
        assert large == 3 * small

    def test_method_tag(self, ctx50):
        assert eval_product(SumSpec(3, 1, 1), ctx50).method is Method.PRODUCT


class TestNaive:
    def test_two_one_vanishes(self, ctx50):
        assert abs(eval_naive(SumSpec(2, 1, 1), 500, ctx50).value) < mpf(10) ** -4

    def test_eq_1_1(self, ctx50):
        with ctx50.workdps():
            rhs = parse_const_expr(EQ_1_1).evaluate(ctx50)
            assert abs(eval_naive(SumSpec(5, 1, 5), 2000, ctx50).value - rhs) < mpf(10) ** -4

    @pytest.mark.parametrize("a,b,x,value", FROZEN)
    def test_agrees_with_csch(self, a, b, x, value, ctx50):
        assert abs(eval_naive(spec(a, b, x), 2000, ctx50).value - mpf(value)) < mpf(10) ** -10

    def test_requires_cutoff(self, ctx50):
        with pytest.raises(DomainError):
            eval_naive(SumSpec(3, 1, 1), 5, ctx50)

    def test_reports_bounded_digits(self, ctx50):
        ev = eval_naive(SumSpec(3, 1, 1), 200, ctx50)
        assert 0 <= ev.digits_achieved <= 15 and ev.work > 0
