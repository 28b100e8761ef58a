"""
Tests for exact polynomial algebra and the numeric root finder.
"""

from fractions import Fraction

import numpy as np
import pytest

from lepoly.algebra import (
    BivariatePoly,
    cluster_roots,
    complex_eval,
    gaussian,
    is_squarefree,
    poly_derivative,
    poly_gcd,
    resultant_x,
    resultant_y,
    squarefree_part,
    univariate_roots,
    vanishing_order,
)
from lepoly.errors import AlgebraError, DegreeDropError
from lepoly.parser import poly_parse


class TestDerivative:
    """Test partial derivatives."""

    def test_power_rule(self):
        assert poly_derivative(poly_parse("x^2+y^3"), "x") == poly_parse("2x")

    def test_mixed_monomial(self):
        assert poly_derivative(poly_parse("x*y"), "x") == poly_parse("y")

    def test_constant(self):
        assert poly_derivative(poly_parse("7"), "x").is_zero

    def test_unknown_variable(self):
        with pytest.raises(AlgebraError):
            poly_derivative(poly_parse("x"), "z")


class TestGcd:
    """Test gcd normalization."""

    def test_common_factor(self):
        assert poly_gcd(poly_parse("x^2"), poly_parse("x*y")) == poly_parse("x")

    def test_idempotent_and_normalized(self):
        f = poly_parse("2x^2+2y^3")
        assert poly_gcd(f, f) == poly_parse("x^2+y^3")

    def test_coprime(self):
        common = poly_gcd(poly_parse("x^2+y^3"), poly_parse("y"))
        assert common.is_constant
        assert str(common) == "1"

    def test_two_zeros_rejected(self):
        with pytest.raises(AlgebraError):
            poly_gcd(BivariatePoly.zero(), BivariatePoly.zero())


class TestResultant:
    """Test Sylvester resultants."""

    def test_linear_first_argument(self):
        assert resultant_x(poly_parse("x-1"), poly_parse("x^2-y")) == poly_parse("1-y")

    def test_scaled(self):
        res = resultant_x(poly_parse("2x"), poly_parse("3x^2+4y^3"))
        assert res == poly_parse("16y^3")

    def test_cusp_polar(self):
        assert resultant_x(poly_parse("x^2+y^3"), poly_parse("2x")) == poly_parse("4y^3")

    def test_requires_x(self):
        with pytest.raises(AlgebraError):
            resultant_x(poly_parse("y"), poly_parse("x"))

    def test_resultant_in_y(self):
        res = resultant_y(poly_parse("y-x"), poly_parse("y^2-1"))
        assert not res.depends_on("y")
        assert vanishing_order(res - BivariatePoly.constant(-1), "x") == 2


class TestSquarefree:
    """Test squarefree parts."""

    def test_squarefree_part(self):
        assert squarefree_part(poly_parse("x^2*y")) == poly_parse("x*y")

    def test_predicate(self):
        assert is_squarefree(poly_parse("x^2+y^3"))
        assert not is_squarefree(poly_parse("x^2"))
        assert not is_squarefree(BivariatePoly.zero())


class TestTransforms:
    """Test coordinate changes and the printer."""

    def test_swap(self):
        assert poly_parse("x^2+y^3").swap_variables() == poly_parse("y^2+x^3")

    def test_linear_change(self):
        p = poly_parse("x").linear_change(Fraction(1, 2), Fraction(0))
        assert p == poly_parse("x+1/2*y")

    def test_printer_round_trip(self):
        for text in ["x^2+y^3", "(1+i)*x*y", "1/2*x - i*y^2", "-x^3*y + 7", "0"]:
            p = poly_parse(text)
            assert poly_parse(str(p)) == p

    def test_printer_canonical(self):
        assert str(poly_parse("y^3 + x^2")) == str(poly_parse("x^2+y^3"))
        assert str(poly_parse("0")) == "0"
        assert str(poly_parse("x")) == "x"

    def test_univariate_coefficients(self):
        coeffs = poly_parse("y^2-1/2*y").univariate_coefficients("y")
        assert coeffs == [gaussian(0), gaussian(Fraction(-1, 2)), gaussian(1)]
        with pytest.raises(AlgebraError):
            poly_parse("x*y").univariate_coefficients("y")


class TestComplexEval:
    """Test floating point evaluation."""

    def test_examples(self):
        assert complex_eval(poly_parse("x^2+y^3"), 2, 0) == 4
        assert complex_eval(poly_parse("x*y"), 1j, 1j) == -1
        assert complex_eval(poly_parse("y"), 123, 3 + 4j) == 3 + 4j

    def test_overflow(self):
        with pytest.raises(AlgebraError):
            complex_eval(poly_parse("x^200"), 1e10, 0)


class TestUnivariateRoots:
    """Test the Aberth root finder."""

    def test_imaginary_pair(self):
        roots = sorted(univariate_roots([1, 0, 1]), key=lambda z: z.imag)
        assert np.allclose(roots, [-1j, 1j], atol=1e-12)

    def test_double_root(self):
        roots = univariate_roots([1, -2, 1])
        assert np.allclose(roots, [1, 1], atol=1e-6)

    def test_roots_of_unity(self):
        roots = univariate_roots([-1, 0, 0, 1])
        assert len(roots) == 3
        assert np.allclose(roots ** 3, 1, atol=1e-10)
        assert min(abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1 :]) > 1

    def test_zero_roots_deflated(self):
        roots = univariate_roots([0, 0, 1])
        assert list(roots) == [0, 0]

    def test_degree_drop(self):
        with pytest.raises(DegreeDropError):
            univariate_roots([1, 1, 1e-20])

    def test_constant_rejected(self):
        with pytest.raises(AlgebraError):
            univariate_roots([3])


class TestClusterRoots:
    """Test multiplicity inference."""

    def test_groups_close_roots(self):
        clusters = cluster_roots([1, 1 + 1e-9, 2])
        assert sorted(c.multiplicity for c in clusters) == [1, 2]

    def test_validated_double_root(self):
        coeffs = [1, -2, 1]
        clusters = cluster_roots(univariate_roots(coeffs), 1e-6, 1.0, coeffs)
        assert len(clusters) == 1
        assert clusters[0].multiplicity == 2
        assert abs(clusters[0].center - 1) < 1e-8

    def test_empty(self):
        assert cluster_roots([]) == []
