"""
Discriminant slices and geometry selection.

Each polar branch x = x(w), y = w^n gives v(w) = f(x(w), w^n)·conj(g(w^n));
the polar points over the level t are the solutions of v(w) = t. Zeros of g
inside the y-disc are escape points. select_geometry picks the scales, the
base point λ_t and the path system around all special points.
"""

import cmath
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from numpy.polynomial import polynomial as npoly
from scipy.optimize import root

from .algebra import BivariatePoly, complex_eval, to_complex, univariate_roots
from .errors import (
    BranchPointSearchError,
    GeometryError,
    GeometrySelectionError,
    GermError,
    LepolyError,
    NonGenericProjectionError,
)
from .puiseux import PuiseuxBranch
from .tracking import SheetTracker, TrackerSettings, min_separation

Term = Tuple[int, int, complex]

DROP_TOL = 1e-14
NEWTON_ITER = 60
MAX_SUBDIVISION = 3
MAX_JITTER = 64
COINCIDENCE_TOL = 1e-9
DETOUR_ANGLES = (0.15, -0.15, 0.3, -0.3, 0.45, -0.45, 0.6, -0.6, 0.9, -0.9)


@dataclass(frozen=True)
class DiscBranchSeries:
    """v(w) = f(x(w), w^n)·conj(g(w^n)) for one polar branch."""

    branch: PuiseuxBranch
    branch_id: int
    f: BivariatePoly
    g: BivariatePoly
    expanded: Tuple[Term, ...]

    @property
    def ramification(self) -> int:
        return self.branch.ramification

    @property
    def leading_degree(self) -> int:
        """Smallest p + q over the terms c·w^p·w̄^q."""
        return min(p + q for p, q, _ in self.expanded)

    @property
    def max_degree(self) -> int:
        return max(p + q for p, q, _ in self.expanded)

    @property
    def weight(self) -> float:
        return float(sum(abs(c) for _, _, c in self.expanded))

    def evaluate(self, w: complex) -> complex:
        """Direct composition through complex_eval."""
        y = w ** self.ramification
        return complex_eval(self.f, self.branch.x_at(w), y) * np.conj(
            complex_eval(self.g, 0, y)
        )

    def evaluate_expanded(self, w: complex) -> complex:
        return self.wirtinger(w)[0]

    def wirtinger(self, w: complex) -> Tuple[complex, complex, complex]:
        """v(w), ∂v/∂w and ∂v/∂w̄ from the expanded form."""
        value = a = b = 0j
        wc = np.conj(w)
        for p, q, c in self.expanded:
            value += c * w ** p * wc ** q
            if p:
                a += c * p * w ** (p - 1) * wc ** q
            if q:
                b += c * q * w ** p * wc ** (q - 1)
        return complex(value), complex(a), complex(b)


def assemble_v_series(
    f: BivariatePoly, g: BivariatePoly, branch: PuiseuxBranch, branch_id: int = 0
) -> DiscBranchSeries:
    """
    Compose a polar branch with f and conj(g).

    The expanded form is the exact product of the truncated series; terms
    below 1e-14 of the largest coefficient are dropped.

    Raises:
        GermError: g depends on x
    """
    if g.depends_on("x"):
        raise GermError(f"g = {g} must depend on y only")
    n = branch.ramification
    x_series = branch.x_coefficients()
    composed = np.zeros(1, dtype=complex)
    power = np.ones(1, dtype=complex)
    dense = f.complex_coefficients
    for a in range(dense.shape[0]):
        for b in range(dense.shape[1]):
            if dense[a, b] == 0:
                continue
            term = np.concatenate([np.zeros(n * b, dtype=complex), dense[a, b] * power])
            composed = npoly.polyadd(composed, term)
        power = npoly.polymul(power, x_series)
    g_coeffs = [to_complex(c) for c in g.univariate_coefficients("y")]
    scale = max(float(np.max(np.abs(composed))), np.finfo(float).tiny)
    expanded = [
        (p, n * k, complex(cp * np.conj(gk)))
        for p, cp in enumerate(composed)
        if abs(cp) > DROP_TOL * scale
        for k, gk in enumerate(g_coeffs)
        if gk != 0
    ]
    if not expanded:
        raise GermError(f"branch {branch_id} lies in the zero set of f·ḡ")
    logger.debug(f"v series of branch {branch_id}: {len(expanded)} terms")
    return DiscBranchSeries(branch, branch_id, f, g, tuple(sorted(expanded, key=lambda t: t[:2])))


@dataclass(frozen=True)
class SpecialPoint:
    """A polar branch point or an escape point (zero of g) of the level t."""

    y: complex
    kind: str  # "polar" or "escape"
    branch_id: Optional[int] = None
    w: Optional[complex] = None
    x: Optional[complex] = None
    multiplicity: int = 1
    residual: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        data = {"kind": self.kind, "y": [self.y.real, self.y.imag]}
        if self.kind == "polar":
            data.update(
                branch_id=self.branch_id,
                w=[self.w.real, self.w.imag],
                x=[self.x.real, self.x.imag],
                residual=self.residual,
            )
        else:
            data["multiplicity"] = self.multiplicity
        return data


def _newton(series: DiscBranchSeries, t: complex, w: complex, inner: float, outer: float):
    """Real Newton on v(w) = t; returns (w, outcome) with outcome converged/left/stalled."""
    for _ in range(NEWTON_ITER):
        value, a, b = series.wirtinger(w)
        residual = value - t
        if abs(residual) <= 1e-13 * abs(t):
            return w, "converged"
        det = abs(a) ** 2 - abs(b) ** 2
        if det == 0 or abs(det) <= 1e-14 * (abs(a) ** 2 + abs(b) ** 2):
            return w, "stalled"
        w = w + (b * np.conj(residual) - np.conj(a) * residual) / det
        if not cmath.isfinite(w) or abs(w) > 2 * outer or abs(w) < inner / 4:
            return w, "left"
    value = series.wirtinger(w)[0]
    if abs(value - t) <= 1e-10 * abs(t):
        return w, "converged"
    return w, "stalled"


@dataclass(frozen=True)
class _Cell:
    r0: float
    r1: float
    a0: float
    a1: float
    depth: int = 0

    @property
    def seed(self) -> complex:
        return math.sqrt(self.r0 * self.r1) * cmath.exp(0.5j * (self.a0 + self.a1))

    def split(self) -> List["_Cell"]:
        rm = math.sqrt(self.r0 * self.r1)
        am = 0.5 * (self.a0 + self.a1)
        d = self.depth + 1
        return [
            _Cell(self.r0, rm, self.a0, am, d),
            _Cell(self.r0, rm, am, self.a1, d),
            _Cell(rm, self.r1, self.a0, am, d),
            _Cell(rm, self.r1, am, self.a1, d),
        ]


def _annulus_cells(series: DiscBranchSeries, t: complex, eta1: float, refinement: int):
    n = series.ramification
    outer = eta1 ** (1.0 / n)
    inner = 0.5 * (abs(t) / max(series.weight, 1.0)) ** (1.0 / series.leading_degree)
    inner = min(inner, 0.5 * outer)
    ratio = 1.25 ** (1.0 / refinement)
    rings = max(1, math.ceil(math.log(outer / inner) / math.log(ratio)))
    radii = np.geomspace(inner, outer, rings + 1)
    sectors = 4 * (series.max_degree + 1) * refinement
    angles = np.linspace(0, 2 * math.pi, sectors + 1)
    cells = [
        _Cell(float(r0), float(r1), float(a0), float(a1))
        for r0, r1 in zip(radii, radii[1:])
        for a0, a1 in zip(angles, angles[1:])
    ]
    return cells, inner, outer


def _search_cell(series, t, cell: _Cell, inner: float, outer: float, found: List[complex]):
    """Seed one cell; subdivide when Newton stalls. Returns True when conclusive."""
    w, outcome = _newton(series, t, cell.seed, inner, outer)
    if outcome == "converged":
        found.append(w)
        return True
    if outcome == "left":
        return True
    if cell.depth >= MAX_SUBDIVISION:
        return False
    results = [_search_cell(series, t, sub, inner, outer, found) for sub in cell.split()]
    if not any(results):
        raise BranchPointSearchError(
            f"branch-point search inconclusive near w={cell.seed:.4g} "
            f"(branch {series.branch_id})"
        )
    return True


def _deduplicate(points: Sequence[complex], scale: float) -> List[complex]:
    unique: List[complex] = []
    for w in points:
        if all(abs(w - u) > 1e-8 * max(abs(w), scale) for u in unique):
            unique.append(w)
    return unique


def polish_branch_point(
    polar: BivariatePoly, f: BivariatePoly, g: BivariatePoly, t: complex, x0: complex, y0: complex
) -> Tuple[complex, complex, bool]:
    """
    Refine (x, y) on {P = 0, f·ḡ = t} with 4 real unknowns.

    Returns the refined point and whether the refinement was accepted.
    """
    fx, fy = f.diff("x"), f.diff("y")
    px, py = polar.diff("x"), polar.diff("y")
    g_prime = g.diff("y")

    def system(u: np.ndarray):
        x, y = complex(u[0], u[1]), complex(u[2], u[3])
        gbar = np.conj(complex_eval(g, 0, y))
        p_val = complex_eval(polar, x, y)
        v_val = complex_eval(f, x, y) * gbar - t
        # holomorphic parts in x and y, anti-holomorphic part in ȳ from conj(g)
        rows = [
            (complex_eval(px, x, y), 0j, complex_eval(py, x, y), 0j),
            (
                complex_eval(fx, x, y) * gbar,
                0j,
                complex_eval(fy, x, y) * gbar,
                complex_eval(f, x, y) * np.conj(complex_eval(g_prime, 0, y)),
            ),
        ]
        jac = np.zeros((4, 4))
        for k, (ax, bx, ay, by) in enumerate(rows):
            columns = [ax + bx, 1j * (ax - bx), ay + by, 1j * (ay - by)]
            jac[2 * k] = [c.real for c in columns]
            jac[2 * k + 1] = [c.imag for c in columns]
        return np.array([p_val.real, p_val.imag, v_val.real, v_val.imag]), jac

    start = np.array([x0.real, x0.imag, y0.real, y0.imag])
    try:
        solution = root(system, start, jac=True, method="hybr")
    except LepolyError as e:
        logger.debug(f"polish failed: {e}")
        return x0, y0, False
    x, y = complex(solution.x[0], solution.x[1]), complex(solution.x[2], solution.x[3])
    value = complex_eval(f, x, y) * np.conj(complex_eval(g, 0, y))
    accepted = (
        bool(solution.success)
        and abs(value - t) <= 1e-8 * abs(t)
        and abs(y - y0) <= 1e-2 * max(abs(y0), abs(t))
    )
    return (x, y, True) if accepted else (x0, y0, False)


def solve_branch_points(
    series: DiscBranchSeries,
    t: complex,
    eta1: float,
    polar: Optional[BivariatePoly] = None,
    refinement: int = 1,
) -> List[SpecialPoint]:
    """
    All solutions of v(w) = t with |w^n| < η₁.

    Seeds Newton on a geometric annulus grid around the radius where
    |v| reaches |t|; stalled cells are subdivided up to three times.

    Raises:
        BranchPointSearchError: a cell stays inconclusive after subdivision
    """
    if t == 0:
        raise GeometryError("level t must be nonzero")
    cells, inner, outer = _annulus_cells(series, t, eta1, refinement)
    found: List[complex] = []
    for cell in cells:
        _search_cell(series, t, cell, inner, outer, found)
    n = series.ramification
    points = []
    for w in _deduplicate(found, inner):
        y = w ** n
        if abs(y) >= eta1:
            continue
        residual = abs(series.evaluate_expanded(w) - t)
        x = series.branch.x_at(w)
        if polar is not None and not series.branch.exact:
            x, y, _ = polish_branch_point(polar, series.f, series.g, t, x, y)
        points.append(
            SpecialPoint(
                complex(y), "polar", series.branch_id, complex(w), complex(x), 1, residual
            )
        )
    points.sort(key=lambda p: (round(cmath.phase(p.y) % (2 * math.pi), 9), abs(p.y)))
    logger.debug(f"branch {series.branch_id}: {len(points)} branch points at |t|={abs(t):.3g}")
    return points


def escape_points(g: BivariatePoly, eta1: float) -> List[SpecialPoint]:
    """Zeros of the univariate g inside |y| < η₁; the zero at the origin is exact."""
    if g.is_constant:
        return []
    if g.depends_on("x"):
        raise GermError(f"g = {g} must depend on y only")
    coeffs = np.array([to_complex(c) for c in g.univariate_coefficients("y")])
    zeros = univariate_roots(coeffs)
    points = [
        SpecialPoint(0j if z == 0 else complex(z), "escape")
        for z in zeros
        if abs(z) < eta1
    ]
    return sorted(points, key=lambda p: (abs(p.y), cmath.phase(p.y)))


@dataclass(frozen=True)
class Path:
    """Polyline from λ_t to the guard circle of one special point."""

    target: int
    vertices: Tuple[complex, ...]

    @property
    def departure(self) -> float:
        return cmath.phase(self.vertices[1] - self.vertices[0])

    @property
    def landing(self) -> complex:
        return self.vertices[-1]


@dataclass(frozen=True)
class Geometry:
    epsilon: float
    eta1: float
    eta2: float
    t: complex
    lam: complex
    points: Tuple[SpecialPoint, ...]
    guard_radii: Tuple[float, ...]
    paths: Tuple[Path, ...]
    outer_radius: float
    sep_min: float
    degree: int
    attempts: int = 0

    @property
    def cut(self) -> Tuple[complex, complex]:
        return self.lam, self.outer_radius * cmath.exp(1j * cmath.phase(self.lam))

    @property
    def cut_angle(self) -> float:
        return cmath.phase(self.lam)

    @property
    def polar_points(self) -> List[SpecialPoint]:
        return [p for p in self.points if p.kind == "polar"]

    @property
    def escape_points(self) -> List[SpecialPoint]:
        return [p for p in self.points if p.kind == "escape"]

    def to_dict(self) -> Dict[str, Any]:
        def pair(z: complex) -> List[float]:
            return [z.real, z.imag]

        return {
            "epsilon": self.epsilon,
            "eta1": self.eta1,
            "eta2": self.eta2,
            "t": pair(self.t),
            "lambda": pair(self.lam),
            "outer_radius": self.outer_radius,
            "sep_min": self.sep_min,
            "degree": self.degree,
            "attempts": self.attempts,
            "cut": [pair(z) for z in self.cut],
            "points": [p.to_dict() for p in self.points],
            "guard_radii": list(self.guard_radii),
            "paths": [[pair(z) for z in path.vertices] for path in self.paths],
        }

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass
class GeometrySettings:
    epsilon: float = 0.5
    t_magnitude: Optional[float] = None
    arg_t: float = 0.0
    seed: int = 0
    tol_root: float = 1e-10
    cluster_tol: float = 1e-6
    guard_factor: float = 1e-2
    escape_margin: float = 1e-3
    max_retries: int = 6
    grid_refinement: int = 1
    workers: int = 4


def point_segment_distance(p: complex, a: complex, b: complex) -> float:
    d = b - a
    if d == 0:
        return abs(p - a)
    s = min(1.0, max(0.0, ((p - a) * np.conj(d)).real / abs(d) ** 2))
    return abs(p - (a + s * d))


def _orient(a: complex, b: complex, c: complex) -> float:
    return ((b - a) * np.conj(c - a)).imag


def segment_distance(a: complex, b: complex, c: complex, d: complex) -> float:
    """Euclidean distance between segments [a, b] and [c, d]; 0 when they cross."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return 0.0
    return min(
        point_segment_distance(a, c, d),
        point_segment_distance(b, c, d),
        point_segment_distance(c, a, b),
        point_segment_distance(d, a, b),
    )


class _Selector:
    """One attempt at a fixed level t."""

    def __init__(self, f, g, settings: GeometrySettings, eta1: float, eta2: float, t: complex):
        self.f, self.g = f, g
        self.s = settings
        self.eta1, self.eta2, self.t = eta1, eta2, t
        self.outer_radius = eta1 * (1 - settings.escape_margin)
        self.sep_min = 1e-3 * eta1
        self.degree = f.degree("x")
        self.tracker = SheetTracker(
            f,
            g,
            t,
            TrackerSettings(
                epsilon=settings.epsilon,
                tol_root=settings.tol_root,
                cluster_tol=settings.cluster_tol,
                escape_margin=settings.escape_margin,
            ),
        )

    def check_points(self, points: Sequence[SpecialPoint]) -> None:
        for i, p in enumerate(points):
            for q in points[i + 1 :]:
                if abs(p.y - q.y) <= COINCIDENCE_TOL * max(abs(p.y), abs(q.y)):
                    raise NonGenericProjectionError(
                        f"two {p.kind}/{q.kind} special points lie over the same y = {p.y:.4g}: "
                        "the projection (x, y) ↦ y is not generic for this germ; "
                        "apply a linear change of coordinates"
                    )
        for i, p in enumerate(points):
            if abs(p.y) >= self.outer_radius:
                raise GeometryError(f"special point {p.y:.4g} outside the outer loop")
            for q in points[i + 1 :]:
                if abs(p.y - q.y) < self.sep_min:
                    raise GeometryError(
                        f"special points {p.y:.4g} and {q.y:.4g} closer than sep_min"
                    )

    def guard_radii(self, points: Sequence[SpecialPoint]) -> List[float]:
        radii = []
        for i, p in enumerate(points):
            others = [abs(p.y - q.y) for j, q in enumerate(points) if j != i]
            nearest = min(others + [self.outer_radius - abs(p.y)])
            r = min(self.s.guard_factor * nearest, 0.25 * (self.outer_radius - abs(p.y)))
            if p.kind == "escape":
                r = self._escape_guard(p.y, r)
            radii.append(r)
        return radii

    def _escape_guard(self, center: complex, r: float) -> float:
        """Shrink until every sheet on the guard circle sits at |x| ≥ 2ε."""
        while r > 1e-14:
            ring = center + r * np.exp(2j * np.pi * np.arange(16) / 16)
            try:
                smallest = [min(abs(x) for x in self.tracker.fibre(y).roots) for y in ring]
                if min(smallest) >= 2 * self.s.epsilon:
                    return r
            except LepolyError as e:
                logger.debug(f"escape guard r={r:.3g}: {e}")
            r /= 2
        raise GeometryError(f"no escape guard radius around {center:.4g}")

    def base_fibre_ok(self, lam: complex) -> bool:
        try:
            sample = self.tracker.fibre(lam)
        except LepolyError:
            return False
        limit = self.s.epsilon * (1 - self.s.escape_margin)
        if any(abs(x) >= limit for x in sample.roots):
            return False
        scale = max(abs(x) for x in sample.roots)
        return min_separation(sample.roots) > 1e3 * self.s.cluster_tol * scale

    def clear(self, a: complex, b: complex, points, radii, skip: int = -1) -> bool:
        return all(
            point_segment_distance(p.y, a, b) >= 2 * r
            for j, (p, r) in enumerate(zip(points, radii))
            if j != skip
        )

    def paths(self, lam: complex, points, radii) -> Optional[List[Path]]:
        cut = (lam, self.outer_radius * cmath.exp(1j * cmath.phase(lam)))
        chosen: List[Path] = []
        for j, (p, r) in enumerate(zip(points, radii)):
            path = self._path_to(j, lam, p.y, r, points, radii, cut, chosen)
            if path is None:
                return None
            chosen.append(path)
        return chosen

    def _path_to(self, j, lam, y, r, points, radii, cut, chosen) -> Optional[Path]:
        direct = (y - lam) / abs(y - lam)
        candidates = [(lam, y - r * direct)]
        for delta in DETOUR_ANGLES:
            middle = lam + 0.5 * abs(y - lam) * direct * cmath.exp(1j * delta)
            towards = (middle - y) / abs(middle - y)
            candidates.append((lam, middle, y + r * towards))
        for vertices in candidates:
            segments = list(zip(vertices, vertices[1:]))
            if all(self.clear(a, b, points, radii, skip=j) for a, b in segments) and all(
                self._disjoint(segments, other, cut) for other in chosen
            ):
                return Path(j, tuple(complex(v) for v in vertices))
        return None

    def _disjoint(self, segments, other: Path, cut) -> bool:
        tiny = 1e-12 * self.eta1
        theirs = list(zip(other.vertices, other.vertices[1:]))
        for k, (a, b) in enumerate(segments):
            for m, (c, d) in enumerate(theirs):
                if k == 0 and m == 0:
                    gap = abs(cmath.phase((b - a) / (d - c)))
                    if gap < 1e-6:
                        return False
                    continue
                if segment_distance(a, b, c, d) <= tiny:
                    return False
        return True

    def cut_ok(self, lam: complex, points, radii, paths: Sequence[Path]) -> bool:
        a, b = lam, self.outer_radius * cmath.exp(1j * cmath.phase(lam))
        if not self.clear(a, b, points, radii):
            return False
        for path in paths:
            if abs(cmath.phase((path.vertices[1] - lam) / (b - a))) < 1e-6:
                return False
            for c, d in list(zip(path.vertices, path.vertices[1:]))[1:]:
                if segment_distance(a, b, c, d) <= 1e-12 * self.eta1:
                    return False
        return True


def _series_valid(series: DiscBranchSeries, polar: BivariatePoly, eta1: float) -> bool:
    if series.branch.exact:
        return True
    n = series.ramification
    for k in range(16):
        w = eta1 ** (1.0 / n) * cmath.exp(2j * math.pi * k / 16)
        x, y = series.branch.x_at(w), w ** n
        scale = npoly.polyval2d(abs(x), abs(y), np.abs(polar.complex_coefficients))
        if abs(complex_eval(polar, x, y)) > 1e-8 * max(scale, np.finfo(float).tiny):
            return False
    return True


def choose_scales(
    series: Sequence[DiscBranchSeries], polar: Optional[BivariatePoly], epsilon: float
) -> Tuple[float, float]:
    """η₁ ≤ ε/10 validated against every truncated branch, then η₂ = η₁^d/10."""
    eta1 = epsilon / 10
    for _ in range(20):
        if polar is None or all(_series_valid(s, polar, eta1) for s in series):
            break
        eta1 /= 2
    else:
        raise GeometrySelectionError("Puiseux truncations not valid on any η₁-disc")
    d = max((s.leading_degree / s.ramification for s in series), default=1.0)
    return eta1, eta1 ** d / 10


def select_geometry(
    f: BivariatePoly,
    g: BivariatePoly,
    series: Sequence[DiscBranchSeries],
    polar: Optional[BivariatePoly] = None,
    settings: Optional[GeometrySettings] = None,
) -> Geometry:
    """
    Pick ε, η₁, η₂, t, λ_t and the path system.

    A failed attempt shrinks t by 10 and retries, up to max_retries times.

    Raises:
        GeometrySelectionError: every attempt failed
        NonGenericProjectionError: special points coincide for every t
    """
    s = settings or GeometrySettings()
    eta1, eta2 = choose_scales(series, polar, s.epsilon)
    magnitude = s.t_magnitude if s.t_magnitude is not None else eta2
    escapes = escape_points(g, eta1)
    diagnostics: List[str] = []
    for attempt in range(s.max_retries + 1):
        t = magnitude / 10 ** attempt * cmath.exp(1j * s.arg_t)
        try:
            geometry = _attempt(f, g, series, polar, s, eta1, eta2, t, escapes, attempt)
        except GeometryError as e:
            if isinstance(e, (BranchPointSearchError, NonGenericProjectionError)):
                raise
            logger.warning(f"Geometry attempt {attempt} at |t|={abs(t):.3g} failed: {e}")
            diagnostics.append(f"|t|={abs(t):.3g}: {e}")
            continue
        logger.info(
            f"Geometry: ε={s.epsilon}, η₁={eta1:.4g}, η₂={eta2:.4g}, |t|={abs(t):.4g}, "
            f"{len(geometry.polar_points)} polar and {len(geometry.escape_points)} escape points"
        )
        return geometry
    raise GeometrySelectionError(
        f"geometry selection failed after {s.max_retries + 1} attempts: " + "; ".join(diagnostics)
    )


def _attempt(f, g, series, polar, s, eta1, eta2, t, escapes, attempt) -> Geometry:
    selector = _Selector(f, g, s, eta1, eta2, t)

    def solve(item: DiscBranchSeries) -> List[SpecialPoint]:
        return solve_branch_points(item, t, eta1, polar, s.grid_refinement)

    with ThreadPoolExecutor(max_workers=s.workers) as pool:
        polar_points = [p for found in pool.map(solve, series) for p in found]
    points = polar_points + list(escapes)
    selector.check_points(points)
    radii = selector.guard_radii(points)

    rng = np.random.default_rng(s.seed)
    for k in range(MAX_JITTER):
        angle = 0.0 if (k == 0 and s.seed == 0) else float(rng.uniform(0, 2 * math.pi))
        lam = 0.5 * eta1 * cmath.exp(1j * angle)
        if any(abs(lam - p.y) < max(selector.sep_min, 3 * r) for p, r in zip(points, radii)):
            continue
        if not selector.base_fibre_ok(lam):
            continue
        paths = selector.paths(lam, points, radii)
        if paths is None or not selector.cut_ok(lam, points, radii, paths):
            continue
        return Geometry(
            epsilon=s.epsilon,
            eta1=eta1,
            eta2=eta2,
            t=complex(t),
            lam=complex(lam),
            points=tuple(points),
            guard_radii=tuple(radii),
            paths=tuple(paths),
            outer_radius=selector.outer_radius,
            sep_min=selector.sep_min,
            degree=selector.degree,
            attempts=attempt,
        )
    raise GeometryError(f"no admissible base point after {MAX_JITTER} candidates")
