"""
Fibres of φ_t and sheet tracking.

Over a point y of the disc the fibre of φ_t is the set of x with
f(x, y) = t / conj(g(y)); for fixed y this is a holomorphic equation in x,
so the corrector is plain Newton in x with y as a parameter.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment
from sympy.combinatorics import Permutation

from .algebra import BivariatePoly, cluster_roots, to_complex, univariate_roots
from .errors import (
    DegreeDropError,
    EscapeRegionError,
    LepolyError,
    SheetCollisionError,
    StepUnderflowError,
    TrackingError,
)

Sample = Tuple[float, complex, Tuple[complex, ...]]


def canonical_order(roots: Sequence[complex]) -> List[complex]:
    """Sort fibre roots by argument in [0, 2π), then modulus."""
    return sorted(
        (complex(r) for r in roots),
        key=lambda z: (round(cmath.phase(z) % (2 * math.pi), 12), round(abs(z), 15)),
    )


def min_separation(roots: Sequence[complex]) -> float:
    z = np.asarray(roots, dtype=complex)
    if z.size < 2:
        return math.inf
    gaps = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(gaps, np.inf)
    return float(gaps.min())


def cycles(array_form: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    """Cycles of a permutation, singletons included, each led by its smallest sheet."""
    seen = set()
    result = []
    for start in range(len(array_form)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        nxt = array_form[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = array_form[nxt]
        result.append(tuple(cycle))
    return tuple(result)


@dataclass(frozen=True)
class FibreSample:
    y: complex
    roots: Tuple[complex, ...]
    inside: Tuple[bool, ...]


@dataclass(frozen=True)
class PathTrackResult:
    """Outcome of tracking every sheet along one path or loop."""

    path_id: int
    kind: str  # "path", "loop" or "outer"
    start: FibreSample
    end_roots: Tuple[complex, ...]
    samples: Tuple[Sample, ...] = ()
    permutation: Optional[Permutation] = None
    escaping: Tuple[bool, ...] = ()
    steps: int = 0
    rejected: int = 0

    @property
    def partition(self) -> Tuple[Tuple[int, ...], ...]:
        if self.permutation is None:
            return ()
        return cycles(self.permutation.array_form)


@dataclass
class TrackerSettings:
    epsilon: float = 0.5
    tol_root: float = 1e-10
    cluster_tol: float = 1e-6
    max_step: float = 0.02
    min_step: float = 1e-12
    escape_margin: float = 1e-3
    max_newton: int = 8
    record: bool = False


class SheetTracker:
    """Predictor-corrector continuation of all n fibre roots of φ_t."""

    def __init__(
        self,
        f: BivariatePoly,
        g: BivariatePoly,
        t: complex,
        settings: Optional[TrackerSettings] = None,
    ):
        self.settings = settings or TrackerSettings()
        self.t = complex(t)
        self.f_coefficients = f.complex_coefficients
        self.degree = f.degree("x")
        if self.degree < 1:
            raise TrackingError(f"f = {f} does not depend on x")
        self.g_coefficients = np.array(
            [to_complex(c) for c in g.univariate_coefficients("y")], dtype=complex
        )

    def _target(self, y: complex) -> complex:
        gy = complex(npoly.polyval(y, self.g_coefficients))
        scale = float(npoly.polyval(abs(y), np.abs(self.g_coefficients)))
        if abs(gy) <= 1e-14 * scale:
            raise EscapeRegionError(f"g vanishes at y={y:.6g}: no fibre in the polydisk")
        return self.t / np.conj(gy)

    def coefficients(self, y: complex) -> np.ndarray:
        """Coefficients in x, ascending, of f(x, y) − t/conj(g(y))."""
        coeffs = np.array(npoly.polyval(y, self.f_coefficients.T), dtype=complex)
        coeffs[0] -= self._target(y)
        if abs(coeffs[-1]) <= 1e-14 * np.max(np.abs(coeffs)):
            raise DegreeDropError(f"x-degree drops at y={y:.6g}")
        return coeffs

    def fibre(self, y: complex) -> FibreSample:
        roots = canonical_order(
            univariate_roots(self.coefficients(y), tol_root=self.settings.tol_root)
        )
        return self.sample(y, roots)

    def sample(self, y: complex, roots: Sequence[complex]) -> FibreSample:
        return FibreSample(
            complex(y),
            tuple(complex(r) for r in roots),
            tuple(abs(r) <= self.settings.epsilon for r in roots),
        )

    def distinct_roots(self, y: complex, scale: float) -> int:
        """Number of distinct fibre points at y, merging roots closer than 1e-4·scale."""
        roots = univariate_roots(self.coefficients(y), tol_root=self.settings.tol_root)
        return len(cluster_roots(roots, 1e-4, scale))

    def _correct(self, y: complex, predicted: np.ndarray, previous: np.ndarray):
        """Newton in x; returns (roots, reason) with roots None on rejection."""
        s = self.settings
        coeffs = self.coefficients(y)
        derivative = npoly.polyder(coeffs)
        z = predicted.copy()
        floor = np.finfo(float).tiny + 1e-300
        for _ in range(s.max_newton):
            slope = npoly.polyval(z, derivative)
            if np.any(slope == 0):
                return None, "flat"
            delta = npoly.polyval(z, coeffs) / slope
            z = z - delta
            if np.all(np.abs(delta) <= 1e-14 * np.maximum(np.abs(z), floor)):
                break
        residual = np.abs(npoly.polyval(z, coeffs))
        bound = npoly.polyval(np.abs(z), np.abs(coeffs))
        if not np.all(np.isfinite(z)) or np.any(residual > s.tol_root * bound):
            return None, "newton"
        scale = float(np.max(np.abs(z)))
        if self.degree >= 2:
            if min_separation(z) <= 3 * s.cluster_tol * scale:
                return None, "collision"
            trust = 0.25 * min_separation(previous)
        else:
            trust = 0.25 * max(abs(previous[0]), floor)
        if np.max(np.abs(z - predicted)) > trust:
            return None, "trust"
        return z, "ok"

    def follow(
        self, curve: Callable[[float], complex], roots: Sequence[complex], path_id: int, kind: str
    ) -> PathTrackResult:
        """Track roots along y = curve(s), s from 0 to 1."""
        s_cfg = self.settings
        x = np.asarray(roots, dtype=complex)
        start = self.sample(curve(0.0), x)
        samples: List[Sample] = [(0.0, start.y, tuple(x))] if s_cfg.record else []
        s, h = 0.0, s_cfg.max_step
        x_prev, h_prev = None, None
        steps = rejected = 0
        while s < 1.0:
            h = min(h, 1.0 - s)
            y_new = curve(s + h)
            if x_prev is not None:
                predicted = x + (x - x_prev) * (h / h_prev)
            else:
                predicted = x
            z, reason = self._correct(y_new, predicted, x)
            if z is None:
                rejected += 1
                h /= 2
                if h < s_cfg.min_step:
                    if reason == "collision":
                        raise SheetCollisionError("sheets collided", y_new)
                    raise StepUnderflowError(f"step underflow ({reason})", y_new)
                continue
            x_prev, h_prev = x, h
            x, s = z, s + h
            steps += 1
            if s_cfg.record:
                samples.append((s, y_new, tuple(complex(v) for v in x)))
            h = min(1.5 * h, s_cfg.max_step)
        logger.debug(f"{kind} {path_id}: {steps} steps, {rejected} rejected")
        return PathTrackResult(
            path_id=path_id,
            kind=kind,
            start=start,
            end_roots=tuple(complex(v) for v in x),
            samples=tuple(samples),
            steps=steps,
            rejected=rejected,
        )

    def escaping_flags(self, roots: Sequence[complex]) -> Tuple[bool, ...]:
        limit = self.settings.epsilon * (1 - self.settings.escape_margin)
        return tuple(abs(r) >= limit for r in roots)


def _polyline(vertices: Sequence[complex]) -> Callable[[float], complex]:
    """Arc-length parametrization of a polyline on [0, 1]."""
    points = [complex(v) for v in vertices]
    lengths = [abs(b - a) for a, b in zip(points, points[1:])]
    total = sum(lengths)

    def curve(s: float) -> complex:
        if total == 0:
            return points[0]
        target = s * total
        for (a, b), length in zip(zip(points, points[1:]), lengths):
            if target <= length or length == 0 and target <= 0:
                return a + (b - a) * (target / length if length else 0.0)
            target -= length
        return points[-1]

    return curve


def match_permutation(start: Sequence[complex], end: Sequence[complex]) -> Permutation:
    """Sheet i ends where sheet perm(i) started; raises when the loop does not close."""
    a = np.asarray(start, dtype=complex)
    b = np.asarray(end, dtype=complex)
    cost = np.abs(b[:, None] - a[None, :])
    rows, cols = linear_sum_assignment(cost)
    tolerance = 0.1 * min(min_separation(a), max(np.max(np.abs(a)), 1e-300))
    worst = float(cost[rows, cols].max())
    if worst > tolerance:
        raise TrackingError(f"loop did not close: mismatch {worst:.3g} > {tolerance:.3g}")
    mapping = [0] * len(a)
    for r, c in zip(rows, cols):
        mapping[int(r)] = int(c)
    return Permutation(mapping)


def fibre_roots(
    f: BivariatePoly,
    g: BivariatePoly,
    y: complex,
    t: complex,
    epsilon: float,
    tol_root: float = 1e-10,
) -> FibreSample:
    """
    Roots x of f(x, y) = t / conj(g(y)) with inside flags against ε.

    Raises:
        EscapeRegionError: g(y) vanishes within tolerance
        DegreeDropError: the x-degree of f drops at y
    """
    settings = TrackerSettings(epsilon=epsilon, tol_root=tol_root)
    return SheetTracker(f, g, t, settings).fibre(y)


def track_path(
    tracker: SheetTracker, vertices: Sequence[complex], start: FibreSample, path_id: int = 0
) -> PathTrackResult:
    """Track the fibre along a polyline; escaping flags refer to the endpoint."""
    if len(vertices) < 2 or all(v == vertices[0] for v in vertices):
        n = len(start.roots)
        return PathTrackResult(
            path_id=path_id,
            kind="path",
            start=start,
            end_roots=start.roots,
            permutation=Permutation(list(range(n))),
            escaping=tracker.escaping_flags(start.roots),
        )
    result = tracker.follow(_polyline(vertices), start.roots, path_id, "path")
    return PathTrackResult(
        **{**result.__dict__, "escaping": tracker.escaping_flags(result.end_roots)}
    )


def monodromy_around(
    tracker: SheetTracker,
    center: complex,
    radius: float,
    start: FibreSample,
    path_id: int = 0,
    clockwise: bool = False,
) -> PathTrackResult:
    """Track once around the circle |y − center| = radius starting at start.y."""
    phase0 = cmath.phase(start.y - center)
    direction = -1.0 if clockwise else 1.0

    def curve(s: float) -> complex:
        return center + radius * cmath.exp(1j * (phase0 + direction * 2 * math.pi * s))

    result = tracker.follow(curve, start.roots, path_id, "loop")
    permutation = match_permutation(start.roots, result.end_roots)
    return PathTrackResult(
        **{
            **result.__dict__,
            "permutation": permutation,
            "escaping": tracker.escaping_flags(start.roots),
        }
    )


def outer_loop(
    tracker: SheetTracker, cut: Sequence[complex], start: FibreSample, path_id: int = -1
) -> PathTrackResult:
    """Out along the cut, once around |y| = |cut end| counter-clockwise, and back."""
    inner, outer = complex(cut[0]), complex(cut[1])
    radius, phase0 = abs(outer), cmath.phase(outer)
    record = tracker.settings.record

    out = tracker.follow(_polyline([inner, outer]), start.roots, path_id, "outer")

    def circle(s: float) -> complex:
        return radius * cmath.exp(1j * (phase0 + 2 * math.pi * s))

    around = tracker.follow(circle, out.end_roots, path_id, "outer")
    back = tracker.follow(_polyline([outer, inner]), around.end_roots, path_id, "outer")
    permutation = match_permutation(start.roots, back.end_roots)
    return PathTrackResult(
        path_id=path_id,
        kind="outer",
        start=start,
        end_roots=back.end_roots,
        samples=(out.samples + around.samples + back.samples) if record else (),
        permutation=permutation,
        steps=out.steps + around.steps + back.steps,
        rejected=out.rejected + around.rejected + back.rejected,
    )


@dataclass(frozen=True)
class LocalMonodromy:
    """Tracking data of one special point: approach path and lasso loop."""

    index: int
    kind: str
    path: PathTrackResult
    loop: PathTrackResult
    direct_clusters: Optional[int] = None

    @property
    def permutation(self) -> Permutation:
        return self.loop.permutation

    @property
    def partition(self) -> Tuple[Tuple[int, ...], ...]:
        return self.loop.partition

    @property
    def escaping(self) -> Tuple[bool, ...]:
        return self.path.escaping

    @property
    def orbits(self) -> Tuple[Tuple[int, ...], ...]:
        """Cycles of the local permutation made of escaping sheets."""
        return tuple(c for c in self.partition if all(self.escaping[s] for s in c))


def track_special_point(
    tracker: SheetTracker,
    index: int,
    kind: str,
    center: complex,
    radius: float,
    vertices: Sequence[complex],
    base: FibreSample,
) -> LocalMonodromy:
    """Lasso around one special point: path to the guard circle, then one loop."""
    approach = track_path(tracker, vertices, base, path_id=index)
    landing = tracker.sample(vertices[-1], approach.end_roots)
    loop = monodromy_around(tracker, center, radius, landing, path_id=index)
    direct = None
    if kind == "polar":
        try:
            direct = tracker.distinct_roots(center, max(abs(r) for r in base.roots))
        except LepolyError as e:
            logger.warning(f"Could not cluster the fibre at polar point {index}: {e}")
        if direct is not None and direct != len(loop.partition):
            logger.warning(
                f"Polar point {index}: {direct} distinct fibre points but "
                f"{len(loop.partition)} monodromy cycles"
            )
    return LocalMonodromy(index, kind, approach, loop, direct)


def monodromy_product(
    permutations: Sequence[Permutation], departure_angles: Sequence[float], cut_angle: float
) -> Tuple[Permutation, List[int]]:
    """
    Compose local permutations in counter-clockwise departure order from the cut.

    Returns the product (first factor acts first) and the order used.
    """
    order = sorted(
        range(len(permutations)),
        key=lambda j: (departure_angles[j] - cut_angle) % (2 * math.pi),
    )
    if not permutations:
        raise TrackingError("monodromy product needs the covering degree")
    product = Permutation(list(range(permutations[0].size)))
    for j in order:
        product = product * permutations[j]
    return product, order
