"""
Exact bivariate polynomials over the Gaussian rationals.

Symbolic work (derivatives, gcd, resultants) is exact and delegated to sympy
`Poly` over QQ_I; numerics enter only through `complex_eval` and the
univariate root finder.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from numpy.polynomial import polynomial as npoly
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from sympy import QQ, QQ_I, Poly, symbols
from sympy.polys.polyerrors import ExactQuotientFailed

from .errors import AlgebraError, DegreeDropError, RootFindingError

X, Y = symbols("x y")
GaussianRational = QQ_I.dtype
Monomial = Tuple[int, int]
Coefficient = Union[int, Fraction, GaussianRational]


def gaussian(re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0):
    """Build an exact Gaussian rational re + im·i."""
    re, im = Fraction(re), Fraction(im)
    return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))


def rational_parts(c: GaussianRational) -> Tuple[Fraction, Fraction]:
    return (
        Fraction(int(c.x.numerator), int(c.x.denominator)),
        Fraction(int(c.y.numerator), int(c.y.denominator)),
    )


def to_complex(c: GaussianRational) -> complex:
    return complex(float(c.x), float(c.y))


def conjugate(c: GaussianRational) -> GaussianRational:
    return QQ_I(c.x, -c.y)


def _coerce(c: Coefficient) -> GaussianRational:
    if isinstance(c, GaussianRational):
        return c
    if isinstance(c, (int, Fraction)):
        return gaussian(c)
    raise AlgebraError(f"unsupported coefficient {c!r}")


def _grlex_key(m: Monomial) -> Tuple[int, int]:
    return (m[0] + m[1], m[0])


@dataclass(frozen=True)
class BivariatePoly:
    """Immutable polynomial in x, y with Gaussian rational coefficients."""

    poly: Poly

    @classmethod
    def from_terms(cls, terms: Dict[Monomial, Coefficient]) -> "BivariatePoly":
        rep = {}
        for (a, b), c in terms.items():
            if a < 0 or b < 0:
                raise AlgebraError(f"negative exponent in monomial {(a, b)}")
            c = _coerce(c)
            if c:
                rep[(int(a), int(b))] = c
        if not rep:
            return cls.zero()
        return cls(Poly.from_dict(rep, X, Y, domain=QQ_I))

    @classmethod
    def zero(cls) -> "BivariatePoly":
        return cls(Poly(0, X, Y, domain=QQ_I))

    @classmethod
    def constant(cls, c: Coefficient) -> "BivariatePoly":
        return cls.from_terms({(0, 0): c})

    @classmethod
    def x(cls) -> "BivariatePoly":
        return cls.from_terms({(1, 0): 1})

    @classmethod
    def y(cls) -> "BivariatePoly":
        return cls.from_terms({(0, 1): 1})

    @cached_property
    def terms(self) -> Dict[Monomial, GaussianRational]:
        """Exponent pair → nonzero coefficient; empty for the zero polynomial."""
        return {m: c for m, c in self.poly.as_dict(native=True).items() if c}

    @cached_property
    def complex_coefficients(self) -> np.ndarray:
        """Dense matrix C with C[a, b] the coefficient of x^a y^b."""
        shape = (max(self.degree("x"), 0) + 1, max(self.degree("y"), 0) + 1)
        dense = np.zeros(shape, dtype=complex)
        for (a, b), c in self.terms.items():
            dense[a, b] = to_complex(c)
        return dense

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(m == (0, 0) for m in self.terms)

    def degree(self, var: str) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        index = _var_index(var)
        return max((m[index] for m in self.terms), default=-1)

    def depends_on(self, var: str) -> bool:
        return self.degree(var) > 0

    def coefficient(self, a: int, b: int) -> GaussianRational:
        return self.terms.get((a, b), QQ_I.zero)

    def leading_coefficient(self) -> GaussianRational:
        """Coefficient of the grlex-largest monomial (x > y)."""
        if self.is_zero:
            raise AlgebraError("zero polynomial has no leading coefficient")
        return self.terms[max(self.terms, key=_grlex_key)]

    def monic(self) -> "BivariatePoly":
        inverse = QQ_I.one / self.leading_coefficient()
        return BivariatePoly.from_terms({m: c * inverse for m, c in self.terms.items()})

    def diff(self, var: str) -> "BivariatePoly":
        return BivariatePoly(self.poly.diff(X if _var_index(var) == 0 else Y))

    def exquo(self, other: "BivariatePoly") -> "BivariatePoly":
        """Exact quotient; raises when `other` does not divide `self`."""
        if other.is_zero:
            raise AlgebraError("division by the zero polynomial")
        try:
            return BivariatePoly(self.poly.exquo(other.poly))
        except ExactQuotientFailed as e:
            raise AlgebraError(f"{other} does not divide {self}") from e

    def swap_variables(self) -> "BivariatePoly":
        return BivariatePoly.from_terms({(b, a): c for (a, b), c in self.terms.items()})

    def linear_change(self, a: Fraction, b: Fraction) -> "BivariatePoly":
        """Compose with x ↦ x + a·y, y ↦ y + b·x."""
        new_x = BivariatePoly.x() + BivariatePoly.y() * BivariatePoly.constant(a)
        new_y = BivariatePoly.y() + BivariatePoly.x() * BivariatePoly.constant(b)
        result = BivariatePoly.zero()
        for (i, j), c in self.terms.items():
            result = result + BivariatePoly.constant(c) * new_x ** i * new_y ** j
        return result

    def coefficients_in_x(self, y: complex) -> np.ndarray:
        """Complex coefficients of p(·, y), ascending in x."""
        dense = self.complex_coefficients
        return np.atleast_1d(npoly.polyval(y, dense.T))

    def univariate_coefficients(self, var: str = "y") -> List[GaussianRational]:
        """Ascending exact coefficients of a polynomial in one variable only."""
        other = "x" if _var_index(var) == 1 else "y"
        if self.depends_on(other):
            raise AlgebraError(f"{self} depends on {other}")
        index = _var_index(var)
        coeffs = [QQ_I.zero] * (max(self.degree(var), 0) + 1)
        for m, c in self.terms.items():
            coeffs[m[index]] = c
        return coeffs

    def __call__(self, x: complex, y: complex) -> complex:
        return complex_eval(self, x, y)

    def _lift(self, other: Any) -> "BivariatePoly":
        if isinstance(other, BivariatePoly):
            return other
        return BivariatePoly.constant(other)

    def __add__(self, other: Any) -> "BivariatePoly":
        return BivariatePoly(self.poly + self._lift(other).poly)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "BivariatePoly":
        return BivariatePoly(self.poly - self._lift(other).poly)

    def __rsub__(self, other: Any) -> "BivariatePoly":
        return BivariatePoly(self._lift(other).poly - self.poly)

    def __mul__(self, other: Any) -> "BivariatePoly":
        return BivariatePoly(self.poly * self._lift(other).poly)

    __rmul__ = __mul__

    def __neg__(self) -> "BivariatePoly":
        return BivariatePoly(-self.poly)

    def __pow__(self, k: int) -> "BivariatePoly":
        if k < 0:
            raise AlgebraError("negative power of a polynomial")
        return BivariatePoly(self.poly ** k)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"BivariatePoly({format_poly(self)!r})"


def _var_index(var: str) -> int:
    if var == "x":
        return 0
    if var == "y":
        return 1
    raise AlgebraError(f"unknown variable {var!r}")


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_term(c: GaussianRational, monomial: str) -> Tuple[str, str]:
    re, im = rational_parts(c)
    if im == 0:
        sign = "-" if re < 0 else "+"
        body = "" if abs(re) == 1 and monomial else _format_rational(abs(re))
    elif re == 0:
        sign = "-" if im < 0 else "+"
        body = "i" if abs(im) == 1 else f"{_format_rational(abs(im))}*i"
    else:
        sign = "+"
        imag = "i" if abs(im) == 1 else f"{_format_rational(abs(im))}*i"
        body = f"({_format_rational(re)}{'-' if im < 0 else '+'}{imag})"
    if body and monomial:
        return sign, f"{body}*{monomial}"
    return sign, body or monomial


def _format_monomial(a: int, b: int) -> str:
    factors = []
    for var, e in (("x", a), ("y", b)):
        if e == 1:
            factors.append(var)
        elif e > 1:
            factors.append(f"{var}^{e}")
    return "*".join(factors)


def format_poly(p: BivariatePoly) -> str:
    """Canonical text: grlex descending (x > y), explicit `i`, exact rationals."""
    if p.is_zero:
        return "0"
    parts = []
    for m in sorted(p.terms, key=_grlex_key, reverse=True):
        sign, body = _format_term(p.terms[m], _format_monomial(*m))
        if not parts:
            parts.append(f"-{body}" if sign == "-" else body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


def poly_derivative(p: BivariatePoly, var: str) -> BivariatePoly:
    return p.diff(var)


def poly_gcd(p: BivariatePoly, q: BivariatePoly) -> BivariatePoly:
    """
    Greatest common divisor, normalized to grlex leading coefficient 1.

    Raises:
        AlgebraError: when both inputs are zero
    """
    if p.is_zero and q.is_zero:
        raise AlgebraError("gcd of two zero polynomials is undefined")
    return BivariatePoly(p.poly.gcd(q.poly)).monic()


def squarefree_part(p: BivariatePoly) -> BivariatePoly:
    """p divided by gcd(p, ∂p/∂x, ∂p/∂y), normalized."""
    if p.is_zero:
        raise AlgebraError("squarefree part of the zero polynomial")
    common = poly_gcd(poly_gcd(p, p.diff("x")), p.diff("y"))
    return p.exquo(common).monic()


def is_squarefree(p: BivariatePoly) -> bool:
    if p.is_zero:
        return False
    return poly_gcd(poly_gcd(p, p.diff("x")), p.diff("y")).is_constant


def resultant_x(p: BivariatePoly, q: BivariatePoly) -> BivariatePoly:
    """
    Sylvester resultant eliminating x.

    Returns:
        A polynomial in y only

    Raises:
        AlgebraError: when either input has degree 0 in x
    """
    if p.degree("x") < 1 or q.degree("x") < 1:
        raise AlgebraError(f"resultant_x needs positive x-degree: {p}, {q}")
    res = p.poly.resultant(q.poly)
    if isinstance(res, Poly):
        return BivariatePoly.from_terms(
            {(0, m[0]): c for m, c in res.as_dict(native=True).items()}
        )
    return BivariatePoly.constant(QQ_I.from_sympy(res))


def resultant_y(p: BivariatePoly, q: BivariatePoly) -> BivariatePoly:
    """Resultant eliminating y; a polynomial in x stored with exponents (a, 0)."""
    return resultant_x(p.swap_variables(), q.swap_variables()).swap_variables()


def vanishing_order(p: BivariatePoly, var: str = "y") -> int:
    """Order at 0 of a univariate polynomial; raises for the zero polynomial."""
    if p.is_zero:
        raise AlgebraError("vanishing order of the zero polynomial is infinite")
    index = _var_index(var)
    return min(m[index] for m in p.terms)


def complex_eval(p: BivariatePoly, x: complex, y: complex) -> complex:
    """
    Horner evaluation in complex floating point.

    Relative error grows with term count and conditioning; not certified.
    """
    if p.is_zero:
        return 0j
    with np.errstate(over="ignore", invalid="ignore"):
        value = complex(npoly.polyval2d(complex(x), complex(y), p.complex_coefficients))
    if not np.isfinite(value.real) or not np.isfinite(value.imag):
        raise AlgebraError(f"non-finite value evaluating {p} at x={x}, y={y}")
    return value


def _initial_guesses(monic: np.ndarray) -> np.ndarray:
    degree = monic.size - 1
    radius = max(
        abs(monic[k]) ** (1.0 / (degree - k)) for k in range(degree) if monic[k] != 0
    )
    angles = 2 * np.pi * np.arange(degree) / degree + 0.4
    return radius * np.exp(1j * angles)


def _aberth(monic: np.ndarray, tol_root: float, max_iter: int) -> np.ndarray:
    derivative = npoly.polyder(monic)
    magnitudes = np.abs(monic)
    z = _initial_guesses(monic)
    for _ in range(max_iter):
        with np.errstate(all="ignore"):
            ratio = npoly.polyval(z, monic) / npoly.polyval(z, derivative)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            repulsion = 1.0 / diff
            np.fill_diagonal(repulsion, 0.0)
            step = ratio / (1.0 - ratio * repulsion.sum(axis=1))
        stuck = ~np.isfinite(step)
        if stuck.any():
            # zero derivative at an iterate: nudge off the critical point
            step[stuck] = 1e-3 * (1.0 + np.abs(z[stuck])) * np.exp(0.7j)
        z = z - step
        residual = np.abs(npoly.polyval(z, monic))
        bound = npoly.polyval(np.abs(z), magnitudes)
        if np.all(residual <= 1e-3 * tol_root * bound) or np.all(
            np.abs(step) <= 4 * np.finfo(float).eps * np.abs(z)
        ):
            break
    return z


def univariate_roots(
    coeffs: Sequence[complex],
    tol_root: float = 1e-10,
    lead_tol: float = 1e-14,
    max_iter: int = 500,
) -> np.ndarray:
    """
    All complex roots, with multiplicity, of Σ coeffs[k]·z^k.

    Aberth simultaneous iteration from deterministic guesses on a circle.
    Exact zero roots are deflated before iterating.

    Raises:
        DegreeDropError: leading coefficient below lead_tol × max |coeff|
        RootFindingError: some root misses |p(z)| ≤ tol_root · Σ|c_k||z|^k
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size < 2 or not np.any(c[1:]):
        raise AlgebraError("univariate_roots needs degree ≥ 1")
    if not np.all(np.isfinite(c)):
        raise AlgebraError("non-finite polynomial coefficient")
    scale = np.max(np.abs(c))
    if abs(c[-1]) <= lead_tol * scale:
        raise DegreeDropError(
            f"leading coefficient {abs(c[-1]):.3g} below tolerance (scale {scale:.3g})"
        )
    zero_roots = int(np.flatnonzero(c)[0])
    work = c[zero_roots:] / c[-1]
    degree = work.size - 1
    if degree == 0:
        found = np.zeros(0, dtype=complex)
    elif degree == 1:
        found = np.array([-work[0]])
    else:
        found = _aberth(work, tol_root, max_iter)
        residual = np.abs(npoly.polyval(found, work))
        bound = npoly.polyval(np.abs(found), np.abs(work))
        if not np.all(residual <= tol_root * bound):
            worst = float(np.max(residual / bound))
            raise RootFindingError(
                f"Aberth iteration did not converge (relative residual {worst:.3g})"
            )
    return np.concatenate([np.zeros(zero_roots, dtype=complex), found])


@dataclass(frozen=True)
class RootCluster:
    center: complex
    multiplicity: int


def _polish_multiple(coeffs: np.ndarray, z: complex, m: int, tol: float):
    """Newton on the (m-1)-th derivative, where a root of multiplicity m is simple."""
    d = npoly.polyder(coeffs, m - 1)
    dd = npoly.polyder(d)
    for _ in range(8):
        slope = npoly.polyval(z, dd)
        if slope == 0:
            break
        z = z - npoly.polyval(z, d) / slope
    bound = npoly.polyval(abs(z), np.abs(d))
    return z, abs(npoly.polyval(z, d)) <= tol * max(bound, np.finfo(float).tiny)


def cluster_roots(
    roots: Sequence[complex],
    rel_tol: float = 1e-6,
    scale: float = 1.0,
    coeffs: Sequence[complex] = None,
) -> List[RootCluster]:
    """
    Group numerically coincident roots into clusters with multiplicities.

    Two roots belong together when closer than rel_tol·max(scale, |z|).
    With `coeffs`, each multiple cluster is validated and polished on the
    (m-1)-th derivative; failing clusters are split into simple roots.
    """
    z = np.asarray(roots, dtype=complex).ravel()
    if z.size == 0:
        return []
    size = np.maximum(scale, np.abs(z))
    threshold = rel_tol * np.maximum(size[:, None], size[None, :])
    adjacency = csr_matrix(np.abs(z[:, None] - z[None, :]) <= threshold)
    count, labels = connected_components(adjacency, directed=False)
    poly = None if coeffs is None else np.asarray(coeffs, dtype=complex)
    clusters = []
    for label in range(count):
        members = z[labels == label]
        center = complex(members.mean())
        if members.size > 1 and poly is not None:
            center, valid = _polish_multiple(poly, center, members.size, rel_tol)
            if not valid:
                logger.debug(f"Splitting unvalidated cluster of {members.size} near {center}")
                clusters.extend(RootCluster(complex(r), 1) for r in members)
                continue
        clusters.append(RootCluster(complex(center), int(members.size)))
    return clusters
