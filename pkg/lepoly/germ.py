"""
Germ analysis for f·ḡ: the function h cutting out the critical locus of
φ(x, y) = (y, f·ḡ), the polar curve, the decomposition of the singular set
and the hypothesis checks the construction relies on.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from loguru import logger
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, Field
from sympy import QQ_I

from .algebra import (
    BivariatePoly,
    GaussianRational,
    cluster_roots,
    complex_eval,
    conjugate,
    is_squarefree,
    poly_gcd,
    resultant_x,
    resultant_y,
    to_complex,
    univariate_roots,
    vanishing_order,
)
from .errors import AlgebraError, GermError

MixedMonomial = Tuple[int, int, int, int]


@dataclass(frozen=True)
class MixedRealPoly:
    """Polynomial in x, x̄, y, ȳ; keys are exponent quadruples (x, x̄, y, ȳ)."""

    terms: Dict[MixedMonomial, GaussianRational] = field(default_factory=dict)

    @classmethod
    def hermitian_product(cls, p: BivariatePoly, q: BivariatePoly) -> "MixedRealPoly":
        """p·conj(q) expanded."""
        terms: Dict[MixedMonomial, GaussianRational] = {}
        for (a, b), c in p.terms.items():
            for (i, j), d in q.terms.items():
                key = (a, i, b, j)
                terms[key] = terms.get(key, QQ_I.zero) + c * conjugate(d)
        return cls({k: v for k, v in terms.items() if v})

    def __sub__(self, other: "MixedRealPoly") -> "MixedRealPoly":
        terms = dict(self.terms)
        for key, value in other.terms.items():
            terms[key] = terms.get(key, QQ_I.zero) - value
        return MixedRealPoly({k: v for k, v in terms.items() if v})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_real(self) -> bool:
        """Closed under conjugation: coefficient at (j, i, l, k) is the conjugate."""
        for (i, j, k, l), c in self.terms.items():
            if self.terms.get((j, i, l, k), QQ_I.zero) != conjugate(c):
                return False
        return True

    def evaluate(self, x: complex, y: complex) -> complex:
        xc, yc = np.conj(x), np.conj(y)
        return complex(
            sum(
                to_complex(c) * x ** i * xc ** j * y ** k * yc ** l
                for (i, j, k, l), c in self.terms.items()
            )
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, reverse=True):
            factors = [
                f"{name}^{e}" if e > 1 else name
                for name, e in zip(("x", "xbar", "y", "ybar"), key)
                if e > 0
            ]
            parts.append(f"({QQ_I.to_sympy(self.terms[key])})*{'*'.join(factors) or '1'}")
        return " + ".join(parts)


def critical_set_h(f: BivariatePoly, g: BivariatePoly) -> MixedRealPoly:
    """h = |f·∂g/∂x|² − |g·∂f/∂x|²; its zero set is the critical locus of φ."""
    a = f * g.diff("x")
    b = g * f.diff("x")
    return MixedRealPoly.hermitian_product(a, a) - MixedRealPoly.hermitian_product(b, b)


def _require_univariate_g(g: BivariatePoly) -> None:
    if g.depends_on("x"):
        raise GermError(f"g = {g} depends on x")


def polar_curve(f: BivariatePoly, g: BivariatePoly) -> BivariatePoly:
    """
    ∂f/∂x with every factor shared with f·g removed, normalized.

    Returns the constant 1 for an empty polar curve.
    """
    if f.is_constant:
        raise GermError("f must be nonconstant")
    _require_univariate_g(g)
    fx = f.diff("x")
    if fx.is_zero:
        logger.warning(f"∂f/∂x vanishes identically for f = {f}: empty polar curve")
        return BivariatePoly.constant(1)
    fg = f * g
    polar = fx
    while True:
        common = poly_gcd(polar, fg)
        if common.is_constant:
            break
        polar = polar.exquo(common)
    return polar.monic()


def _scaled_residual(p: BivariatePoly, x: complex, y: complex) -> float:
    """|p(x, y)| relative to Σ |c_ab| |x|^a |y|^b."""
    if p.is_zero:
        return 0.0
    scale = npoly.polyval2d(abs(x), abs(y), np.abs(p.complex_coefficients))
    return abs(complex_eval(p, x, y)) / max(scale, np.finfo(float).tiny)


def _trimmed(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    keep = np.flatnonzero(np.abs(coeffs) > 1e-14 * scale)
    return coeffs[: keep[-1] + 1] if keep.size else coeffs[:0]


def _roots_of(coeffs: np.ndarray) -> List[complex]:
    coeffs = _trimmed(coeffs)
    if coeffs.size < 2:
        return []
    return [c.center for c in cluster_roots(univariate_roots(coeffs), 1e-6, 1e-12)]


@dataclass(frozen=True)
class PolynomialSystem:
    """Common zero set of `equations` near the origin, with a finiteness record."""

    name: str
    equations: Tuple[BivariatePoly, ...]
    empty: bool
    contains_origin: bool
    finite: Optional[bool]
    certificate: str

    def _pivot_pair(self) -> Optional[Tuple[BivariatePoly, BivariatePoly]]:
        active = [e for e in self.equations if not e.is_zero]
        for i, p in enumerate(active):
            for q in active[i + 1:]:
                if poly_gcd(p, q).is_constant:
                    return p, q
        return None

    def points(self, radius: float, tol: float = 1e-8) -> List[Tuple[complex, complex]]:
        """Numeric solutions with |x|, |y| ≤ radius (finite systems only)."""
        if self.empty:
            return []
        pair = self._pivot_pair()
        if pair is None:
            raise GermError(f"{self.name} is not certified finite")
        p, q = pair
        univariate = [e for e in pair if not e.depends_on("x")]
        if univariate:
            eliminant = univariate[0]
        else:
            eliminant = resultant_x(p, q)
        y_coeffs = [to_complex(c) for c in eliminant.univariate_coefficients("y")]
        solver = next((e for e in self.equations if e.depends_on("x")), None)
        if solver is None:
            return []
        found: List[Tuple[complex, complex]] = []
        for y0 in _roots_of(np.array(y_coeffs)):
            if abs(y0) > radius:
                continue
            for x0 in _roots_of(solver.coefficients_in_x(y0)):
                if abs(x0) > radius:
                    continue
                if all(_scaled_residual(e, x0, y0) <= tol for e in self.equations):
                    if not any(abs(x0 - a) + abs(y0 - b) <= 1e-9 for a, b in found):
                        found.append((x0, y0))
        return found


def _system(name: str, equations: List[BivariatePoly]) -> PolynomialSystem:
    active = [e for e in equations if not e.is_zero]
    if any(e.is_constant for e in active):
        return PolynomialSystem(name, tuple(equations), True, False, True, "constant equation")
    contains_origin = all((0, 0) not in e.terms for e in active)
    if all(not e.depends_on("x") for e in active):
        common = active[0]
        for e in active[1:]:
            common = poly_gcd(common, e)
        if common.is_constant:
            return PolynomialSystem(
                name, tuple(equations), True, False, True, "coprime univariate equations"
            )
        return PolynomialSystem(
            name, tuple(equations), False, contains_origin, False, "x is unconstrained"
        )
    for i, p in enumerate(active):
        for q in active[i + 1:]:
            if not poly_gcd(p, q).is_constant:
                continue
            certificate = f"gcd({p}, {q}) = 1"
            try:
                res = resultant_x(p, q)
                certificate += f"; Res_x = {res}, order at 0: {vanishing_order(res)}"
            except AlgebraError:
                pass
            return PolynomialSystem(
                name, tuple(equations), False, contains_origin, True, certificate
            )
    return PolynomialSystem(
        name, tuple(equations), False, contains_origin, None, "no coprime pair"
    )


@dataclass(frozen=True)
class SigmaDecomposition:
    """Σ(f) ∪ Σ(g) ∪ ({f = 0} ∩ {g = 0}), the singular set of f·g."""

    sigma_f: PolynomialSystem
    sigma_g: PolynomialSystem
    zero_intersection: PolynomialSystem

    @property
    def systems(self) -> Tuple[PolynomialSystem, ...]:
        return (self.sigma_f, self.sigma_g, self.zero_intersection)

    def points(self, radius: float) -> List[Tuple[complex, complex]]:
        return [pt for system in self.systems for pt in system.points(radius)]


def sigma_decomposition(f: BivariatePoly, g: BivariatePoly) -> SigmaDecomposition:
    """
    The three systems {f=f_x=f_y=0}, {g=g_x=g_y=0} and {f=g=0}.

    Raises:
        GermError: f or g not reduced, or gcd(f, g) ≠ 1
    """
    if f.is_zero or g.is_zero:
        raise GermError("f and g must be nonzero")
    if not f.is_constant and not is_squarefree(f):
        raise GermError(f"f = {f} is not reduced")
    if not g.is_constant and not is_squarefree(g):
        raise GermError(f"g = {g} is not reduced")
    if not poly_gcd(f, g).is_constant:
        raise GermError(f"gcd(f, g) = {poly_gcd(f, g)} ≠ 1")
    return SigmaDecomposition(
        _system("Σ(f)", [f, f.diff("x"), f.diff("y")]),
        _system("Σ(g)", [g, g.diff("x"), g.diff("y")]),
        _system("f⁻¹(0) ∩ g⁻¹(0)", [f, g]),
    )


class HypothesisReport(BaseModel):
    """Outcome of the hypothesis checks; every flag is backed by a message."""

    mode: Literal["holomorphic", "fgbar"]
    germ_at_origin: bool
    g_univariate: bool
    f_reduced: bool
    g_reduced: bool
    coprime: bool
    fg_isolated_singularity: bool
    x_regular: bool
    coordinates_swapped: bool = False
    messages: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(
            (
                self.germ_at_origin,
                self.g_univariate,
                self.f_reduced,
                self.g_reduced,
                self.coprime,
                self.fg_isolated_singularity,
                self.x_regular,
            )
        )

    def failures(self) -> List[str]:
        return [m for m in self.messages if m.startswith("FAIL")]


def is_x_regular(f: BivariatePoly) -> bool:
    """f(x, 0) = c·x^n with c ≠ 0 and n = deg_x f, so all n sheets stay near x = 0."""
    n = f.degree("x")
    return n > 0 and [a for a, b in f.terms if b == 0] == [n]


def normalize_coordinates(
    f: BivariatePoly, g: BivariatePoly
) -> Tuple[BivariatePoly, BivariatePoly, bool]:
    """Swap x and y when that puts (f, g) in the form the construction needs."""
    if g.depends_on("x") and not g.depends_on("y"):
        logger.info("g depends only on x: exchanging the roles of x and y")
        return f.swap_variables(), g.swap_variables(), True
    if g.is_constant and not is_x_regular(f) and is_x_regular(f.swap_variables()):
        logger.info("f is y-regular but not x-regular: exchanging x and y")
        return f.swap_variables(), g.swap_variables(), True
    return f, g, False


def _isolated_singularity(F: BivariatePoly, messages: List[str]) -> bool:
    if F.is_constant:
        messages.append("FAIL fg is constant")
        return False
    if not is_squarefree(F):
        messages.append(f"FAIL fg = {F} is not squarefree")
        return False
    Fx, Fy = F.diff("x"), F.diff("y")
    if (0, 0) in Fx.terms or (0, 0) in Fy.terms:
        messages.append("fg_isolated_singularity: origin is a regular point of fg")
        return True
    try:
        rx, ry = resultant_x(Fx, Fy), resultant_y(Fx, Fy)
        if not rx.is_zero and not ry.is_zero:
            messages.append(
                "fg_isolated_singularity (resultant proxy for (A)): "
                f"ord_y Res_x = {vanishing_order(rx, 'y')}, "
                f"ord_x Res_y = {vanishing_order(ry, 'x')}"
            )
            return True
    except AlgebraError:
        pass
    common = poly_gcd(Fx, Fy)
    if (0, 0) in common.terms:
        messages.append(
            f"fg_isolated_singularity (gcd fallback, proxy for (A)): gcd(fg_x, fg_y) = {common}"
        )
        return True
    messages.append(f"FAIL (fg)_x and (fg)_y share the curve {common} through 0")
    return False


def check_hypotheses(
    f: BivariatePoly, g: BivariatePoly, coordinates_swapped: bool = False
) -> HypothesisReport:
    """Classify the germ and run every hypothesis check; never raises."""
    messages: List[str] = []
    mode = "holomorphic" if g.is_constant and not g.is_zero else "fgbar"
    messages.append(f"mode = {mode}")

    germ_at_origin = not (f * g).is_zero and (0, 0) not in (f * g).terms
    messages.append(
        "f·g vanishes at 0" if germ_at_origin else "FAIL f·g does not vanish at the origin"
    )

    g_univariate = not g.depends_on("x")
    messages.append(
        f"g univariate in y: support {sorted(g.terms)}"
        if g_univariate
        else f"FAIL g = {g} depends on x"
    )

    f_reduced = not f.is_constant and is_squarefree(f)
    messages.append(
        f"f reduced: gcd(f, f_x, f_y) = 1" if f_reduced else f"FAIL f = {f} is not reduced"
    )

    g_reduced = not g.is_zero and (g.is_constant or is_squarefree(g))
    messages.append("g reduced" if g_reduced else f"FAIL g = {g} is not reduced")

    coprime = False
    if not f.is_zero and not g.is_zero:
        common = poly_gcd(f, g)
        coprime = common.is_constant
        messages.append("gcd(f,g) = 1" if coprime else f"FAIL gcd(f,g) ≠ 1 (gcd = {common})")

    if coprime and f_reduced and g_reduced:
        isolated = _isolated_singularity(f * g, messages)
    else:
        isolated = False
        messages.append("FAIL fg_isolated_singularity not checked: f, g not reduced and coprime")

    x_regular = is_x_regular(f)
    axis = sorted(a for a, b in f.terms if b == 0)
    messages.append(
        f"x-regular: f(x, 0) = c·x^{f.degree('x')}"
        if x_regular
        else f"FAIL f is not x-regular: f(x, 0) has x-exponents {axis}, need exactly "
        f"[{max(f.degree('x'), 0)}] so that every sheet stays near x = 0; "
        "apply a linear change of coordinates"
    )

    report = HypothesisReport(
        mode=mode,
        germ_at_origin=germ_at_origin,
        g_univariate=g_univariate,
        f_reduced=f_reduced,
        g_reduced=g_reduced,
        coprime=coprime,
        fg_isolated_singularity=isolated,
        x_regular=x_regular,
        coordinates_swapped=coordinates_swapped,
        messages=messages,
    )
    logger.info(f"Hypotheses for f={f}, g={g}: passed={report.passed}")
    return report


def wirtinger_partials(
    f: BivariatePoly, g: BivariatePoly, x: complex, y: complex
) -> Tuple[complex, complex, complex, complex]:
    """(∂/∂x, ∂/∂x̄, ∂/∂y, ∂/∂ȳ) of f·ḡ at (x, y)."""
    fv, gv = complex_eval(f, x, y), complex_eval(g, x, y)
    return (
        complex_eval(f.diff("x"), x, y) * np.conj(gv),
        fv * np.conj(complex_eval(g.diff("x"), x, y)),
        complex_eval(f.diff("y"), x, y) * np.conj(gv),
        fv * np.conj(complex_eval(g.diff("y"), x, y)),
    )


def real_jacobian(f: BivariatePoly, g: BivariatePoly, x: complex, y: complex) -> np.ndarray:
    """2×4 real Jacobian of f·ḡ in the coordinates (Re x, Im x, Re y, Im y)."""
    dx, dxb, dy, dyb = wirtinger_partials(f, g, x, y)
    columns = [dx + dxb, 1j * (dx - dxb), dy + dyb, 1j * (dy - dyb)]
    return np.array([[c.real for c in columns], [c.imag for c in columns]])


def probe_critical_locus(
    f: BivariatePoly, g: BivariatePoly, seed: int = 0, samples: int = 200, box: float = 0.1
) -> int:
    """
    Estimate the real dimension of C(φ) = {h = 0} near the origin.

    Looks for sign changes of h along random segments; a zero where the
    gradient of h does not vanish makes C(φ) a real hypersurface (3).
    Otherwise reports 2.
    """
    h = critical_set_h(f, g)
    rng = np.random.default_rng(seed)

    def value(v: np.ndarray) -> float:
        return h.evaluate(complex(v[0], v[1]), complex(v[2], v[3])).real

    for _ in range(samples):
        a, b = rng.uniform(-box, box, size=(2, 4))
        ha, hb = value(a), value(b)
        if ha == 0 or hb == 0 or np.sign(ha) == np.sign(hb):
            continue
        for _ in range(60):
            mid = (a + b) / 2
            if np.sign(value(mid)) == np.sign(ha):
                a = mid
            else:
                b = mid
        point = (a + b) / 2
        step = 1e-7 * box
        gradient = [
            (value(point + step * e) - value(point - step * e)) / (2 * step)
            for e in np.eye(4)
        ]
        if np.linalg.norm(gradient) > 1e-8 * max(abs(ha), abs(hb)) / box:
            logger.info(f"h has a regular zero near {point}: C(φ) is a real hypersurface")
            return 3
    return 2
