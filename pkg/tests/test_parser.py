import pytest

from workbench.algebra.polynomials import format_polynomial, polynomial_ring
from workbench.algebra.ratfunc import RationalFunction
from workbench.core.errors import ParseError
from workbench.services.parser import parse_polynomial, parse_rational_function


class TestPolynomialParser:
    """Polynomials over QQ in declared variables"""

    def test_basic_expression(self):
        p = parse_polynomial("x^2*y - 3/4", ["x", "y"])
        assert format_polynomial(p) == "x^2*y - 3/4"

    def test_parentheses_and_powers(self):
        R = polynomial_ring(("x",))
        x = R.gens[0]
        assert parse_polynomial("-(x + 1)^2", ["x"]) == -(x + 1) ** 2
        assert parse_polynomial("2*x*x - x^2", ["x"]) == x**2

    def test_no_variables(self):
        assert format_polynomial(parse_polynomial("1/2 + 1/2", [])) == "1"

    def test_unknown_variable_has_offset(self):
        with pytest.raises(ParseError) as info:
            parse_polynomial("x + q", ["x"])
        assert info.value.position == 4
        assert str(info.value) == "unknown variable 'q' at offset 4"

    def test_empty_input(self):
        with pytest.raises(ParseError, match="empty input at offset 0"):
            parse_polynomial("", ["x"])

    @pytest.mark.parametrize("text", ["x/y", "x/2", "3/x"])
    def test_division_is_not_a_polynomial(self, text):
        with pytest.raises(ParseError, match="malformed rational"):
            parse_polynomial(text, ["x", "y"])

    def test_zero_denominator(self):
        with pytest.raises(ParseError) as info:
            parse_polynomial("3/0", ["x"])
        assert "zero denominator" in str(info.value)
        assert info.value.position == 1

    @pytest.mark.parametrize("text, position", [("x +", 3), ("x $ y", 2), ("(x + y", 6), ("x^y", 2)])
    def test_syntax_errors(self, text, position):
        with pytest.raises(ParseError) as info:
            parse_polynomial(text, ["x", "y"])
        assert info.value.position == position


class TestRationalParser:
    """Elements of QQ(t)"""

    def test_inverse_of_t(self):
        r = parse_rational_function("1/t")
        assert r.valuation() == -1
        assert r == RationalFunction.t() ** -1

    def test_quotients(self):
        t = RationalFunction.t()
        assert parse_rational_function("(t^2 - 1)/(t - 1)") == t + 1
        assert parse_rational_function("t/2") == t * parse_rational_function("1/2")

    def test_division_by_zero(self):
        with pytest.raises(ParseError, match="division by zero"):
            parse_rational_function("t/(t - t)")

    def test_other_letters_are_unknown(self):
        with pytest.raises(ParseError, match="unknown variable 's'"):
            parse_rational_function("s + t")
