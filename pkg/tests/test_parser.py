"""
Tests for the polynomial text parser.
"""

import pytest

from lepoly.algebra import BivariatePoly, gaussian
from lepoly.errors import PolyParseError
from lepoly.parser import poly_parse, tokenize


class TestPolyParse:
    """Test accepted syntax."""

    def test_sum_of_powers(self):
        p = poly_parse("x^2+y^3")
        assert p.terms == {(2, 0): gaussian(1), (0, 3): gaussian(1)}

    def test_implicit_multiplication(self):
        assert poly_parse("2x y") == poly_parse("2*x*y")
        assert poly_parse("(x+1)(x-1)") == poly_parse("x^2-1")

    def test_python_power(self):
        assert poly_parse("x**3") == poly_parse("x^3")

    def test_right_associative_power(self):
        assert poly_parse("x^2^3") == poly_parse("x^8")

    def test_rational_and_gaussian_coefficients(self):
        p = poly_parse("1/2*x - i*y")
        assert p.terms == {(1, 0): gaussian("1/2"), (0, 1): gaussian(0, -1)}

    def test_unary_minus_binds_looser_than_power(self):
        assert poly_parse("-x^2") == -poly_parse("x^2")

    def test_zero(self):
        assert poly_parse("x - x").is_zero
        assert poly_parse("0") == BivariatePoly.zero()

    def test_whitespace(self):
        assert poly_parse("  x ^ 2  +  y ^ 3 ") == poly_parse("x^2+y^3")


class TestParseErrors:
    """Test rejected input and error positions."""

    def test_dangling_operator(self):
        with pytest.raises(PolyParseError) as exc:
            poly_parse("x^")
        assert exc.value.position == 2

    def test_negative_exponent(self):
        with pytest.raises(PolyParseError, match="negative exponent"):
            poly_parse("x^-1")

    def test_non_constant_divisor(self):
        with pytest.raises(PolyParseError, match="non-constant"):
            poly_parse("x/y")

    def test_division_by_zero(self):
        with pytest.raises(PolyParseError, match="division by zero"):
            poly_parse("x/0")

    def test_decimal_literal(self):
        with pytest.raises(PolyParseError, match="rationals"):
            poly_parse("1.5x")

    def test_unknown_character(self):
        with pytest.raises(PolyParseError) as exc:
            poly_parse("x + z")
        assert exc.value.position == 4

    def test_unbalanced_parenthesis(self):
        with pytest.raises(PolyParseError):
            poly_parse("(x+1")

    def test_exit_code(self):
        with pytest.raises(PolyParseError) as exc:
            poly_parse("")
        assert exc.value.exit_code == 1


class TestTokenize:
    """Test the tokenizer."""

    def test_tokens(self):
        kinds = [t.kind for t in tokenize("2x^10")]
        assert kinds == ["num", "name", "op", "num", "end"]
