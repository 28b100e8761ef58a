"""
Independent checks of pipeline results.

Nothing here uses tracking or polyhedron code: the Milnor number comes
from exact resultants, fibre counts from numpy.roots.
"""

from collections import Counter
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel

from .algebra import BivariatePoly, resultant_x, to_complex, vanishing_order
from .errors import AlgebraError, OracleError

GENERIC_SEEDS: Tuple[Tuple[Fraction, Fraction], ...] = (
    (Fraction(1, 3), Fraction(2, 7)),
    (Fraction(2, 5), Fraction(-1, 4)),
    (Fraction(-3, 4), Fraction(5, 9)),
    (Fraction(5, 7), Fraction(1, 8)),
)


class OracleResult(BaseModel):
    name: str
    value: Union[int, str]
    method: str
    agrees: Optional[bool] = None


def milnor_number_resultant(
    f: BivariatePoly, seeds: Sequence[Tuple[Fraction, Fraction]] = GENERIC_SEEDS
) -> int:
    """
    μ(f) at the origin as ord_y Res_x(f_x, f_y) in generic coordinates.

    The order can only overcount in special coordinates, so the minimum
    over the seeded linear changes is returned.

    Raises:
        OracleError: f is smooth at 0, or the singularity is not isolated
    """
    if (0, 0) in f.terms:
        raise OracleError(f"{f} does not vanish at the origin")
    if (1, 0) in f.terms or (0, 1) in f.terms:
        raise OracleError(f"{f} is smooth at the origin")
    orders = []
    for a, b in seeds:
        h = f.linear_change(a, b)
        try:
            res = resultant_x(h.diff("x"), h.diff("y"))
        except AlgebraError as e:
            logger.debug(f"seed ({a}, {b}) skipped: {e}")
            continue
        if res.is_zero:
            logger.debug(f"seed ({a}, {b}): resultant vanishes identically")
            continue
        orders.append(vanishing_order(res, "y"))
    if not orders:
        raise OracleError(f"{f} has no isolated singularity at the origin")
    logger.debug(f"Milnor number orders per seed: {orders}")
    return min(orders)


def annulus_oracle(t: complex, epsilon: float, eta1: float) -> Tuple[int, int, int]:
    """(χ, b₀, b₁) of {x·ȳ = t} in the polydisk: an annulus."""
    if t == 0:
        raise OracleError("t must be nonzero")
    if abs(t) / epsilon >= eta1:
        raise OracleError(f"|t|/ε = {abs(t) / epsilon:.3g} ≥ η₁: fibre is empty")
    return 0, 1, 1


def brute_force_fibre_count(
    f: BivariatePoly,
    g: BivariatePoly,
    t: complex,
    epsilon: float,
    eta1: float,
    grid: int = 32,
) -> Dict[int, int]:
    """
    Histogram {root count in |x| ≤ ε: number of grid points} over the y-disc.

    Grid points sit at cell centres of a grid × grid square, so y = 0 is
    never sampled; points outside |y| < η₁ are skipped.
    """
    if grid < 16:
        raise OracleError("grid must be at least 16")
    dense = f.complex_coefficients
    g_coeffs = [to_complex(c) for c in g.univariate_coefficients("y")]
    offsets = (np.arange(grid) + 0.5) / grid * 2 - 1
    counts: Counter = Counter()
    for re in offsets:
        for im in offsets:
            y = eta1 * complex(re, im)
            if abs(y) >= eta1:
                continue
            gbar = np.conj(np.polyval(g_coeffs[::-1], y))
            coeffs = np.polynomial.polynomial.polyval(y, dense.T) * gbar
            coeffs[0] -= t
            roots = np.roots(coeffs[::-1])
            counts[int(np.sum(np.abs(roots) <= epsilon))] += 1
    return dict(sorted(counts.items()))


def histogram_mode(histogram: Dict[int, int]) -> int:
    """Most frequent count; ties go to the larger count."""
    return max(histogram, key=lambda k: (histogram[k], k))
