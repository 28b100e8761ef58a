"""
Newton-Puiseux expansion of plane curve branches at the origin.

Branches are written as x = Σ α_j w^{m_j} with y = w^n. Exponents stay exact
(fractions of y-degree); coefficients are complex floats solved from edge
polynomials.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger

from .algebra import (
    BivariatePoly,
    GaussianRational,
    cluster_roots,
    complex_eval,
    is_squarefree,
    to_complex,
    univariate_roots,
)
from .errors import PuiseuxError

Point = Tuple[int, Fraction]
NumericPoly = Dict[Point, complex]

CANCELLATION_TOL = 1e-10
MAX_DEPTH = 64


@dataclass(frozen=True)
class NewtonPolygonEdge:
    """One edge of the lower Newton polygon, left end first.

    `coefficients` is the edge polynomial Σ q_{a,b} c^{a - a_start}, ascending.
    """

    start: Point
    end: Point
    slope: Fraction
    coefficients: Tuple[Any, ...]

    @property
    def exponent(self) -> Fraction:
        """Leading y-exponent μ of the roots x ~ c·y^μ this edge produces."""
        return -self.slope


@dataclass(frozen=True)
class NewtonPolygon:
    edges: Tuple[NewtonPolygonEdge, ...]
    x_multiplicity: int
    y_multiplicity: int

    @property
    def has_axis_branch(self) -> bool:
        """True when x divides the polynomial, i.e. x = 0 is a branch."""
        return self.x_multiplicity > 0


@dataclass(frozen=True)
class PuiseuxBranch:
    """x = Σ α_j w^{m_j}, y = w^n; the x = 0 branch has no terms and is_axis set."""

    ramification: int
    terms: Tuple[Tuple[int, complex], ...]
    order: int
    exact: bool
    is_axis: bool = False

    @property
    def leading_exponent(self) -> Fraction:
        if not self.terms:
            return Fraction(10 ** 9)
        return Fraction(self.terms[0][0], self.ramification)

    def x_coefficients(self) -> np.ndarray:
        """Dense coefficients of x(w), ascending in w."""
        degree = self.terms[-1][0] if self.terms else 0
        dense = np.zeros(degree + 1, dtype=complex)
        for m, alpha in self.terms:
            dense[m] = alpha
        return dense

    def x_at(self, w: complex) -> complex:
        return complex(sum(alpha * w ** m for m, alpha in self.terms))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ramification": self.ramification,
            "terms": [[m, alpha.real, alpha.imag] for m, alpha in self.terms],
            "order": self.order,
            "exact": self.exact,
            "axis": self.is_axis,
        }


@dataclass(frozen=True)
class _Leaf:
    terms: Tuple[Tuple[Fraction, complex], ...]
    exact: bool

    @property
    def ramification(self) -> int:
        n = 1
        for e, _ in self.terms:
            n = n * e.denominator // math.gcd(n, e.denominator)
        return n


def _lowest_points(points) -> Dict[int, Fraction]:
    lowest: Dict[int, Fraction] = {}
    for a, b in points:
        if a not in lowest or b < lowest[a]:
            lowest[a] = b
    return lowest


def _cross(o: Point, p: Point, q: Point) -> Fraction:
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def _lower_chain(lowest: Dict[int, Fraction], stop: int) -> List[Point]:
    """Lower convex hull vertices from the leftmost point to column `stop`."""
    chain: List[Point] = []
    for point in sorted((a, b) for a, b in lowest.items() if a <= stop):
        while len(chain) >= 2 and _cross(chain[-2], chain[-1], point) <= 0:
            chain.pop()
        chain.append(point)
    return chain


def _edges(
    chain: List[Point], coefficient: Callable[[int, Fraction], Any], zero: Any
) -> List[NewtonPolygonEdge]:
    edges = []
    for start, end in zip(chain, chain[1:]):
        slope = Fraction(end[1] - start[1]) / (end[0] - start[0])
        line = start[1] - slope * start[0]
        coeffs = tuple(
            coefficient(a, line + slope * a) or zero for a in range(start[0], end[0] + 1)
        )
        edges.append(NewtonPolygonEdge(start, end, slope, coeffs))
    return edges


def newton_polygon(p: BivariatePoly) -> NewtonPolygon:
    """
    Lower Newton polygon of p at the origin.

    Only the part with negative slopes is returned: the edges that produce
    branches through the origin of the form x ~ c·y^μ.

    Raises:
        PuiseuxError: p is zero or p(0,0) ≠ 0
    """
    if p.is_zero:
        raise PuiseuxError("Newton polygon of the zero polynomial")
    if (0, 0) in p.terms:
        raise PuiseuxError(f"{p} does not vanish at the origin")
    points = [(a, Fraction(b)) for a, b in p.terms]
    lowest = _lowest_points(points)
    b_min = min(lowest.values())
    stop = min(a for a, b in lowest.items() if b == b_min)
    chain = _lower_chain(lowest, stop)

    def coefficient(a: int, b: Fraction):
        if b.denominator != 1:
            return None
        return p.terms.get((a, int(b)))

    edges = _edges(chain, coefficient, GaussianRational(0))
    return NewtonPolygon(tuple(edges), min(lowest), int(b_min))


def _shift(q: NumericPoly, mu: Fraction, c: complex) -> NumericPoly:
    """Substitute x = c·y^μ + x₁ and drop cancelled terms."""
    total: Dict[Point, complex] = {}
    weight: Dict[Point, float] = {}
    for (a, b), value in q.items():
        for k in range(a + 1):
            part = comb(a, k) * value * c ** (a - k)
            key = (k, b + mu * (a - k))
            total[key] = total.get(key, 0j) + part
            weight[key] = weight.get(key, 0.0) + abs(part)
    return {
        key: value
        for key, value in total.items()
        if abs(value) > CANCELLATION_TOL * weight[key]
    }


class _Expander:
    def __init__(self, order: int, cluster_tol: float, tol_root: float):
        self.order = order
        self.cluster_tol = cluster_tol
        self.tol_root = tol_root

    def expand(self, q: NumericPoly, multiplicity: int, prefix, depth: int) -> List[_Leaf]:
        if depth > MAX_DEPTH:
            raise PuiseuxError(f"failed to separate branches within {MAX_DEPTH} steps")
        lowest = _lowest_points(q)
        if multiplicity not in lowest:
            raise PuiseuxError("numerical Newton polygon lost its pivot vertex")
        leaves: List[_Leaf] = []
        zero_roots = min(lowest)
        if zero_roots > 1:
            raise PuiseuxError("repeated branch: input is not squarefree")
        if zero_roots == 1:
            leaves.append(_Leaf(tuple(prefix), exact=True))
        chain = _lower_chain(lowest, multiplicity)
        for edge in _edges(chain, lambda a, b: q.get((a, b)), 0j):
            coeffs = np.array(edge.coefficients, dtype=complex)
            roots = univariate_roots(coeffs, tol_root=self.tol_root)
            scale = float(np.max(np.abs(roots)))
            for cluster in cluster_roots(roots, self.cluster_tol, scale, coeffs):
                leaves.extend(self._follow(q, edge.exponent, cluster, prefix, depth))
        return leaves

    def _follow(self, q, mu, cluster, prefix, depth) -> List[_Leaf]:
        extended = tuple(prefix) + ((mu, cluster.center),)
        if cluster.multiplicity == 1 and prefix:
            ramification = _Leaf(extended, exact=False).ramification
            if mu * ramification > self.order:
                return [_Leaf(tuple(prefix), exact=False)]
        shifted = _shift(q, mu, cluster.center)
        return self.expand(shifted, cluster.multiplicity, extended, depth + 1)


def _conjugate(leaf: _Leaf, k: int) -> List[complex]:
    n = leaf.ramification
    zeta = cmath.exp(2j * cmath.pi * k / n)
    return [c * zeta ** int(e * n) for e, c in leaf.terms]


def _same(a: Sequence[complex], b: Sequence[complex], tol: float) -> bool:
    return all(abs(x - y) <= tol * max(abs(x), abs(y)) for x, y in zip(a, b))


def _group_conjugates(leaves: List[_Leaf], tol: float) -> List[List[_Leaf]]:
    remaining = list(leaves)
    groups = []
    while remaining:
        leaf = remaining.pop(0)
        group = [leaf]
        exponents = [e for e, _ in leaf.terms]
        for k in range(1, leaf.ramification):
            target = _conjugate(leaf, k)
            match = next(
                (
                    i
                    for i, other in enumerate(remaining)
                    if [e for e, _ in other.terms] == exponents
                    and _same([c for _, c in other.terms], target, tol)
                ),
                None,
            )
            if match is None:
                raise PuiseuxError("incomplete conjugacy class of Puiseux leaves")
            group.append(remaining.pop(match))
        groups.append(group)
    return groups


def _phase(c: complex) -> float:
    return round(cmath.phase(c) % (2 * math.pi), 9) % round(2 * math.pi, 9)


def _to_branch(group: List[_Leaf], order: int) -> PuiseuxBranch:
    if not group[0].terms:
        return PuiseuxBranch(1, (), order, exact=True, is_axis=True)
    leaf = min(group, key=lambda lf: (_phase(lf.terms[0][1]), abs(lf.terms[0][1])))
    n = leaf.ramification
    terms = tuple((int(e * n), complex(c)) for e, c in leaf.terms)
    return PuiseuxBranch(n, terms, order, exact=leaf.exact)


def _sort_key(branch: PuiseuxBranch):
    if branch.is_axis:
        return (1, Fraction(0), 0.0, 0.0)
    alpha = branch.terms[0][1]
    return (0, branch.leading_exponent, _phase(alpha), abs(alpha))


def puiseux_branches(
    p: BivariatePoly,
    order: int = 20,
    cluster_tol: float = 1e-6,
    tol_root: float = 1e-10,
) -> List[PuiseuxBranch]:
    """
    Puiseux expansions of every branch of {p = 0} through the origin.

    Args:
        p: squarefree polynomial vanishing at the origin, not divisible by y
        order: w-exponent bound; terms past it are dropped once branches
            are separated
        cluster_tol: relative distance below which edge roots coincide

    Returns:
        One PuiseuxBranch per branch, ordered by leading exponent, then by
        the argument of the leading coefficient; the x = 0 branch comes last

    Raises:
        PuiseuxError: non-squarefree input, y | p, or no separation at max depth
    """
    polygon = newton_polygon(p)
    if order < 1:
        raise PuiseuxError("truncation order must be positive")
    if polygon.y_multiplicity > 0:
        raise PuiseuxError(f"y divides {p}; the component y = 0 has no expansion in y")
    if not is_squarefree(p):
        raise PuiseuxError(f"{p} is not squarefree")
    q = {(a, Fraction(b)): to_complex(c) for (a, b), c in p.terms.items()}
    pivot = polygon.edges[-1].end[0] if polygon.edges else polygon.x_multiplicity
    expander = _Expander(order, cluster_tol, tol_root)
    leaves = expander.expand(q, pivot, (), 0)
    groups = _group_conjugates(leaves, tol=max(1e3 * cluster_tol, 1e-6))
    branches = sorted((_to_branch(g, order) for g in groups), key=_sort_key)
    logger.debug(
        f"Puiseux expansion of {p}: "
        f"{[(b.ramification, len(b.terms), b.exact) for b in branches]}"
    )
    return branches


def branch_residual(branch: PuiseuxBranch, p: BivariatePoly, w: complex) -> float:
    """|p(x(w), w^n)| for the truncated series."""
    return abs(complex_eval(p, branch.x_at(w), w ** branch.ramification))
