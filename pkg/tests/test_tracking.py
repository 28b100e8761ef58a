"""
Tests for fibre computation, sheet tracking and local monodromy.
"""

import pytest
from sympy.combinatorics import Permutation

from lepoly.errors import DegreeDropError, EscapeRegionError, TrackingError
from lepoly.parser import poly_parse
from lepoly.tracking import (
    SheetTracker,
    TrackerSettings,
    canonical_order,
    cycles,
    fibre_roots,
    match_permutation,
    monodromy_around,
    monodromy_product,
    outer_loop,
    track_path,
    track_special_point,
)


def _tracker(f, g="1", t=1e-6, **settings):
    return SheetTracker(poly_parse(f), poly_parse(g), t, TrackerSettings(**settings))


class TestFibreRoots:
    """Test the fibre of φ_t over one point."""

    def test_square_roots(self):
        sample = fibre_roots(poly_parse("x^2"), poly_parse("1"), 0.3, 4, 0.5)
        assert sorted(r.real for r in sample.roots) == pytest.approx([-2, 2])
        assert sample.inside == (False, False)

    def test_antiholomorphic_target(self):
        sample = fibre_roots(poly_parse("x"), poly_parse("y"), 0.025, 5e-3, 0.5)
        assert sample.roots[0] == pytest.approx(0.2)
        assert sample.inside == (True,)

    def test_conjugate_of_g(self):
        y = 0.01j
        sample = fibre_roots(poly_parse("x"), poly_parse("y"), y, 1e-4, 0.5)
        assert sample.roots[0] == pytest.approx(1e-4 / y.conjugate())

    def test_multiple_root_at_branch_point(self):
        sample = fibre_roots(poly_parse("x^2+y^3"), poly_parse("1"), 0.01, 1e-6, 0.5)
        assert all(abs(r) < 1e-6 for r in sample.roots)

    def test_zero_of_g(self):
        with pytest.raises(EscapeRegionError):
            fibre_roots(poly_parse("x"), poly_parse("y"), 0, 1e-3, 0.5)

    def test_degree_drop(self):
        with pytest.raises(DegreeDropError):
            fibre_roots(poly_parse("x*y - 1"), poly_parse("1"), 0, 1e-3, 0.5)

    def test_canonical_order(self):
        assert canonical_order([-1, 1j, 1]) == [1, 1j, -1]


class TestPermutations:
    """Test permutation helpers."""

    def test_cycles(self):
        assert cycles([1, 0, 2]) == ((0, 1), (2,))
        assert cycles([1, 2, 0]) == ((0, 1, 2),)

    def test_match(self):
        perm = match_permutation([1, -1], [-1, 1])
        assert perm.array_form == [1, 0]

    def test_loop_not_closed(self):
        with pytest.raises(TrackingError):
            match_permutation([1, -1], [0.5, -1])

    def test_product_order(self):
        a, b = Permutation([1, 0, 2]), Permutation([0, 2, 1])
        product, order = monodromy_product([a, b], [1.0, 0.5], 0.0)
        assert order == [1, 0]
        assert product == b * a

    def test_product_measured_from_cut(self):
        a, b = Permutation([1, 0, 2]), Permutation([0, 2, 1])
        _, order = monodromy_product([a, b], [1.0, 0.5], 0.75)
        assert order == [0, 1]

    def test_empty_product(self):
        with pytest.raises(TrackingError):
            monodromy_product([], [], 0.0)


class TestLoops:
    """Test tracking around special points."""

    def test_constant_path(self):
        tracker = _tracker("x^2+y^3")
        start = tracker.fibre(0.03)
        result = track_path(tracker, [0.03, 0.03], start)
        assert result.permutation.array_form == [0, 1]
        assert result.end_roots == start.roots

    def test_path_ends_on_fibre(self):
        tracker = _tracker("x^2+y^3")
        result = track_path(tracker, [0.03, 0.02 + 0.01j], tracker.fibre(0.03))
        expected = tracker.fibre(0.02 + 0.01j).roots
        for r in result.end_roots:
            assert min(abs(r - e) for e in expected) < 1e-9

    def test_transposition_around_cusp_branch_point(self):
        tracker = _tracker("x^2+y^3", t=1e-6)
        start = tracker.fibre(0.011)
        loop = monodromy_around(tracker, 0.01, 1e-3, start)
        assert loop.permutation.array_form == [1, 0]
        assert loop.partition == ((0, 1),)

    def test_identity_around_regular_point(self):
        tracker = _tracker("x^2+y^3", t=1e-6)
        loop = monodromy_around(tracker, 0.03, 1e-3, tracker.fibre(0.031))
        assert loop.permutation.array_form == [0, 1]

    def test_three_cycle_and_reverse(self):
        tracker = _tracker("x^3+y^4", t=1e-8)
        start = tracker.fibre(0.011)
        forward = monodromy_around(tracker, 0.01, 1e-3, start)
        backward = monodromy_around(tracker, 0.01, 1e-3, start, clockwise=True)
        assert len(forward.partition) == 1
        assert (forward.permutation * backward.permutation).is_Identity

    def test_step_size_does_not_change_permutation(self):
        coarse = _tracker("x^3+y^4", t=1e-8)
        fine = _tracker("x^3+y^4", t=1e-8, max_step=0.01)
        a = monodromy_around(coarse, 0.01, 1e-3, coarse.fibre(0.011))
        b = monodromy_around(fine, 0.01, 1e-3, fine.fibre(0.011))
        assert a.permutation == b.permutation

    def test_escape_orbit(self):
        tracker = _tracker("x^2+y^3", "y", t=6.25e-7)
        start = tracker.fibre(5e-7)
        loop = monodromy_around(tracker, 0, 5e-7, start)
        assert loop.permutation.array_form == [1, 0]
        assert loop.escaping == (True, True)

    def test_outer_loop(self):
        tracker = _tracker("x^2+y^3", t=1.25e-5)
        start = tracker.fibre(0.025)
        result = outer_loop(tracker, (0.025, 0.04995), start)
        assert result.kind == "outer"
        assert result.permutation.array_form == [1, 0]

    def test_lasso(self):
        tracker = _tracker("x^2+y^3", t=1e-6)
        base = tracker.fibre(0.025)
        lasso = track_special_point(tracker, 0, "polar", 0.01, 1e-4, [0.025, 0.0101], base)
        assert lasso.partition == ((0, 1),)
        assert lasso.escaping == (False, False)
        assert lasso.orbits == ()
        assert lasso.direct_clusters == 1
