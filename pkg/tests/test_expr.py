import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from norden.errors import DomainError, ParseError
from norden.expr import differentiate, evaluate, parse, to_string


class TestParseEvaluate:
    def test_difference_of_squares(self):
        e = parse("x1^2 - x2^2", 2)
        assert evaluate(e, (3.0, 1.0)) == 8.0

    def test_exponential_at_zero(self):
        assert evaluate(parse("exp(2*x1)", 1), (0.0,)) == 1.0

    def test_constant(self):
        assert evaluate(parse("5", 4), (1.0, 2.0, 3.0, 4.0)) == 5.0

    def test_nested_expression_matches_hand_evaluation(self):
        e = parse("sin(x1)*exp(x2) + x1/x2 - 2^3", 2)
        x1, x2 = 0.5, 2.0
        expected = math.sin(x1) * math.exp(x2) + x1 / x2 - 8.0
        assert abs(evaluate(e, (x1, x2)) - expected) < 1e-15

    def test_power_binds_tighter_than_unary_minus(self):
        assert evaluate(parse("-x1^2", 1), (3.0,)) == -9.0

    def test_power_binds_tighter_than_product(self):
        assert evaluate(parse("2*x1^2", 1), (3.0,)) == 18.0

    def test_negative_integer_exponent(self):
        assert abs(evaluate(parse("x1^-2", 1), (2.0,)) - 0.25) < 1e-15

    def test_left_associativity(self):
        assert evaluate(parse("2 - 3 - 4", 1), (0.0,)) == -5.0
        assert evaluate(parse("12/2/3", 1), (0.0,)) == 2.0

    def test_division_by_zero_reports_subexpression(self):
        e = parse("1/x1", 1)
        with pytest.raises(DomainError) as err:
            evaluate(e, (0.0,))
        assert "x1" in str(err.value)

    def test_log_domain(self):
        with pytest.raises(DomainError):
            evaluate(parse("ln(x1)", 1), (-1.0,))
        with pytest.raises(DomainError):
            evaluate(parse("ln(x1)", 1), (0.0,))

    def test_zero_to_negative_power(self):
        with pytest.raises(DomainError):
            evaluate(parse("x1^-1", 1), (0.0,))


MALFORMED = [
    "",
    "   ",
    "x1 +",
    "(x1",
    "x1)",
    "2*",
    "sin x1",
    "x1^x2",
    "x1^2.5",
    "x9",        # outside dimension 4
    "y1",
    "3..5",
    "x1 @ x2",
    "* x1",
    "exp()",
    "1e+",
]


class TestParseErrors:
    @pytest.mark.parametrize("text", MALFORMED)
    def test_malformed_inputs_rejected_with_position(self, text):
        with pytest.raises(ParseError) as err:
            parse(text, 4)
        assert isinstance(err.value.position, int)
        assert err.value.position >= 0

    def test_position_points_at_offender(self):
        with pytest.raises(ParseError) as err:
            parse("x1 + @", 4)
        assert err.value.position == 5


def _tree(draw_depth):
    leaf = st.one_of(
        st.integers(1, 3).map(lambda i: f"x{i}"),
        st.floats(0.1, 5.0).map(lambda v: f"{v:.3f}"),
    )
    def extend(children):
        ops = st.one_of(
            st.tuples(children, children).map(lambda ab: f"({ab[0]} + {ab[1]})"),
            st.tuples(children, children).map(lambda ab: f"({ab[0]} - {ab[1]})"),
            st.tuples(children, children).map(lambda ab: f"{ab[0]}*{ab[1]}"),
            children.map(lambda a: f"sin({a})"),
            children.map(lambda a: f"exp({a})"),
            st.tuples(children, st.integers(1, 3)).map(lambda an: f"({an[0]})^{an[1]}"),
            children.map(lambda a: f"-{a}"),
        )
        return ops
    return st.recursive(leaf, extend, max_leaves=draw_depth)


class TestRoundTrip:
    @settings(max_examples=40, deadline=None)
    @given(_tree(10), st.integers(0, 10_000))
    def test_print_parse_round_trip_evaluates_identically(self, text, seed):
        e = parse(text, 3)
        back = parse(to_string(e), 3)
        pts = np.random.default_rng(seed).uniform(0.2, 1.5, size=(10, 3))
        for p in pts:
            a = evaluate(e, p)
            b = evaluate(back, p)
            assert abs(a - b) <= 1e-12 * max(1.0, abs(a))

    def test_round_trip_at_hundred_points(self):
        e = parse("exp(x1/4)*sin(x2) - (x3^2 + 1.5)/(x1 + 2) + cos(x2)^3", 3)
        back = parse(to_string(e), 3)
        for p in np.random.default_rng(0).uniform(-1.0, 1.0, size=(100, 3)):
            assert abs(evaluate(e, p) - evaluate(back, p)) < 1e-12


class TestDifferentiate:
    def test_polynomial_derivative(self):
        d = differentiate(parse("x1^2 - x2^2", 2), 0)
        for x1 in (0.0, 0.5, -2.0, 3.25):
            assert abs(evaluate(d, (x1, 1.0)) - 2 * x1) < 1e-14

    def test_constant_derivative_is_zero(self):
        d = differentiate(parse("7.5", 2), 0)
        assert evaluate(d, (1.0, 2.0)) == 0.0

    def test_matches_finite_differences(self):
        e = parse("exp(2*x1)*sin(x2)", 2)
        d = differentiate(e, 0)
        h = 1e-5
        pts = np.random.default_rng(3).uniform(-1.0, 1.0, size=(50, 2))
        for p in pts:
            fd = (evaluate(e, (p[0] + h, p[1])) - evaluate(e, (p[0] - h, p[1]))) / (2 * h)
            exact = evaluate(d, p)
            assert abs(exact - fd) < 1e-8 * max(1.0, abs(exact))

    def test_third_order_nesting(self):
        e = parse("exp(2*x1)*sin(x2)", 2)
        d3 = differentiate(differentiate(differentiate(e, 0), 0), 0)
        for p in np.random.default_rng(4).uniform(-1, 1, size=(10, 2)):
            expected = 8 * math.exp(2 * p[0]) * math.sin(p[1])
            assert abs(evaluate(d3, p) - expected) < 1e-12 * max(1.0, abs(expected))

    @settings(max_examples=30, deadline=None)
    @given(_tree(8), _tree(8), st.floats(-2, 2), st.integers(0, 1000))
    def test_linearity(self, ta, tb, alpha, seed):
        f = parse(ta, 3)
        g = parse(tb, 3)
        combo = parse(f"{alpha}*({ta}) + ({tb})", 3)
        d_combo = differentiate(combo, 1)
        df = differentiate(f, 1)
        dg = differentiate(g, 1)
        for p in np.random.default_rng(seed).uniform(0.3, 1.2, size=(5, 3)):
            lhs = evaluate(d_combo, p)
            rhs = alpha * evaluate(df, p) + evaluate(dg, p)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs))

    @settings(max_examples=30, deadline=None)
    @given(_tree(8), st.integers(0, 1000))
    def test_mixed_partials_commute(self, text, seed):
        e = parse(text, 3)
        d01 = differentiate(differentiate(e, 0), 1)
        d10 = differentiate(differentiate(e, 1), 0)
        for p in np.random.default_rng(seed).uniform(0.3, 1.2, size=(5, 3)):
            a = evaluate(d01, p)
            b = evaluate(d10, p)
            assert abs(a - b) <= 1e-10 * max(1.0, abs(a), abs(b))
