"""
Tests for Newton polygons and Puiseux expansions.
"""

import math
from fractions import Fraction

import pytest

from lepoly.errors import PuiseuxError
from lepoly.parser import poly_parse
from lepoly.puiseux import branch_residual, newton_polygon, puiseux_branches


class TestNewtonPolygon:
    """Test the lower Newton polygon."""

    def test_cusp(self):
        polygon = newton_polygon(poly_parse("x^2+y^3"))
        assert len(polygon.edges) == 1
        edge = polygon.edges[0]
        assert edge.start == (0, 3)
        assert edge.end == (2, 0)
        assert edge.slope == Fraction(-3, 2)
        assert edge.exponent == Fraction(3, 2)
        assert not polygon.has_axis_branch

    def test_two_edges(self):
        polygon = newton_polygon(poly_parse("x^3 - x*y^2 + y^5"))
        assert [e.exponent for e in polygon.edges] == [Fraction(3), Fraction(1)]

    def test_axis_branch(self):
        polygon = newton_polygon(poly_parse("x^2 + x*y^2"))
        assert polygon.x_multiplicity == 1
        assert polygon.has_axis_branch

    def test_rejects_unit(self):
        with pytest.raises(PuiseuxError):
            newton_polygon(poly_parse("1 + x"))

    def test_rejects_zero(self):
        with pytest.raises(PuiseuxError):
            newton_polygon(poly_parse("0"))


class TestPuiseuxBranches:
    """Test branch expansions."""

    def test_cusp_is_one_ramified_branch(self):
        branches = puiseux_branches(poly_parse("x^2-y^3"))
        assert len(branches) == 1
        branch = branches[0]
        assert branch.ramification == 2
        assert branch.terms[0][0] == 3
        assert abs(branch.terms[0][1] - 1) < 1e-10
        assert branch.exact

    def test_node_has_two_smooth_branches(self):
        branches = puiseux_branches(poly_parse("x^2-y^2"))
        assert [b.ramification for b in branches] == [1, 1]
        assert abs(branches[0].terms[0][1] - 1) < 1e-10
        assert abs(branches[1].terms[0][1] + 1) < 1e-10

    def test_axis_branch_last(self):
        branches = puiseux_branches(poly_parse("x^2 - x*y"))
        assert len(branches) == 2
        assert not branches[0].is_axis
        assert branches[1].is_axis
        assert branches[1].terms == ()

    @pytest.mark.parametrize("order,slope", [(4, 8), (5, 10)])
    def test_truncation_error_slope(self, order, slope):
        p = poly_parse("x^2-y^3-y^4")
        branch = puiseux_branches(p, order=order)[0]
        assert not branch.exact
        near, far = branch_residual(branch, p, 1e-3), branch_residual(branch, p, 1e-2)
        assert math.log10(far / near) == pytest.approx(slope, abs=0.1)

    def test_residual_of_exact_branch(self):
        p = poly_parse("x^3+y^4")
        for branch in puiseux_branches(p):
            assert branch.ramification == 3
            assert branch_residual(branch, p, 0.01) < 1e-20

    def test_deterministic(self):
        p = poly_parse("x^3 - x*y^2 + y^5")
        assert puiseux_branches(p) == puiseux_branches(p)

    def test_total_multiplicity(self):
        p = poly_parse("x^3 - x*y^2 + y^5")
        branches = puiseux_branches(p)
        assert sum(b.ramification for b in branches) == 3

    def test_to_dict(self):
        data = puiseux_branches(poly_parse("x^2-y^3"))[0].to_dict()
        assert data["ramification"] == 2
        assert data["terms"][0][0] == 3

    @pytest.mark.parametrize("text", ["x^2", "y*(x-y)", "x + 1", "0"])
    def test_rejects(self, text):
        with pytest.raises(PuiseuxError):
            puiseux_branches(poly_parse(text))
