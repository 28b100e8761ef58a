"""
Tests for the independent oracles.
"""

import pytest

from lepoly.errors import OracleError
from lepoly.oracle import (
    GENERIC_SEEDS,
    annulus_oracle,
    brute_force_fibre_count,
    histogram_mode,
    milnor_number_resultant,
)
from lepoly.parser import poly_parse


class TestMilnorNumber:
    """Test μ from resultants."""

    @pytest.mark.parametrize(
        "f,mu",
        [("x^2+y^3", 2), ("x^2-y^2", 1), ("x^3+y^4", 6), ("x^2+y^6", 5), ("x^3-x*y^2+y^5", 4)],
    )
    def test_examples(self, f, mu):
        assert milnor_number_resultant(poly_parse(f)) == mu

    def test_each_seed_agrees(self):
        f = poly_parse("x^3+y^4")
        for seed in GENERIC_SEEDS[:3]:
            assert milnor_number_resultant(f, seeds=[seed]) == 6

    def test_smooth(self):
        with pytest.raises(OracleError, match="smooth"):
            milnor_number_resultant(poly_parse("x+y^2"))

    def test_not_at_origin(self):
        with pytest.raises(OracleError):
            milnor_number_resultant(poly_parse("x^2+y^3+1"))

    def test_non_isolated(self):
        with pytest.raises(OracleError, match="isolated"):
            milnor_number_resultant(poly_parse("x^2"))


class TestAnnulusOracle:
    """Test the closed form for x·ȳ."""

    def test_annulus(self):
        assert annulus_oracle(5e-3, 0.5, 0.05) == (0, 1, 1)

    def test_zero_level(self):
        with pytest.raises(OracleError):
            annulus_oracle(0, 0.5, 0.05)

    def test_empty_fibre(self):
        with pytest.raises(OracleError):
            annulus_oracle(0.05, 0.5, 0.05)


class TestBruteForce:
    """Test grid fibre counts."""

    def test_cusp_counts_two_everywhere(self):
        histogram = brute_force_fibre_count(
            poly_parse("x^2+y^3"), poly_parse("1"), 1.25e-5, 0.5, 0.05, grid=16
        )
        assert set(histogram) == {2}
        assert histogram_mode(histogram) == 2

    def test_annulus_has_empty_fibres_near_zero(self):
        histogram = brute_force_fibre_count(poly_parse("x"), poly_parse("y"), 5e-3, 0.5, 0.05)
        assert histogram.get(0, 0) > 0
        assert histogram_mode(histogram) == 1

    def test_grid_too_small(self):
        with pytest.raises(OracleError):
            brute_force_fibre_count(poly_parse("x"), poly_parse("1"), 1e-3, 0.5, 0.05, grid=8)

    def test_mode_tie_prefers_larger(self):
        assert histogram_mode({1: 4, 2: 4, 3: 1}) == 2
