"""
End-to-end construction: text germ in, Lê polyhedron report out.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Literal, Optional

import pandas as pd
from loguru import logger
from pydantic import BaseModel, Field
from sympy.combinatorics import Permutation

from . import __version__
from .algebra import BivariatePoly, squarefree_part
from .config import RunConfig
from .discriminant import (
    DiscBranchSeries,
    Geometry,
    GeometrySettings,
    assemble_v_series,
    select_geometry,
)
from .errors import (
    ConsistencyError,
    HypothesisError,
    LepolyError,
    SheetCollisionError,
    StepUnderflowError,
)
from .germ import (
    HypothesisReport,
    check_hypotheses,
    normalize_coordinates,
    polar_curve,
    probe_critical_locus,
)
from .oracle import (
    OracleResult,
    annulus_oracle,
    brute_force_fibre_count,
    histogram_mode,
    milnor_number_resultant,
)
from .parser import poly_parse
from .polyhedron import (
    CollapseSummary,
    LePolyhedron,
    build_polyhedron,
    collapse_summary,
    defect_chi,
    euler_and_betti,
    export_graph,
)
from .puiseux import PuiseuxBranch, puiseux_branches
from .tracking import (
    LocalMonodromy,
    PathTrackResult,
    SheetTracker,
    TrackerSettings,
    monodromy_product,
    outer_loop,
    track_special_point,
)

RESELECTIONS = 2
RESELECTION_STRIDE = 7919


class SpecialPointReport(BaseModel):
    index: int
    kind: Literal["polar", "escape"]
    y: List[float]
    branch_id: Optional[int] = None
    residual: Optional[float] = None
    guard_radius: float
    departure_angle: float
    permutation: List[int]
    partition: List[List[int]]
    cluster_count: int
    direct_cluster_count: Optional[int] = None
    escaping_sheets: List[int] = Field(default_factory=list)
    orbit_sizes: List[int] = Field(default_factory=list)


class Invariants(BaseModel):
    chi: int
    b0: int
    b1: int
    vertices: int
    edges: int


class MonodromyCheck(BaseModel):
    status: Literal["pass", "fail"]
    product: List[int]
    outer: List[int]
    order: List[int]


class Report(BaseModel):
    """Single source of truth for one run; serialized with stable key order."""

    tool: str = "lepoly"
    version: str = __version__
    status: Literal["ok", "failed"] = "ok"
    exit_code: int = 0
    error: Optional[str] = None
    config: Dict[str, Any] = Field(default_factory=dict)
    f: Optional[str] = None
    g: Optional[str] = None
    hypotheses: Optional[HypothesisReport] = None
    polar_curve: Optional[str] = None
    branches: List[Dict[str, Any]] = Field(default_factory=list)
    n: Optional[int] = None
    k: Optional[int] = None
    escape_count: Optional[int] = None
    geometry: Optional[Dict[str, Any]] = None
    special_points: List[SpecialPointReport] = Field(default_factory=list)
    invariants: Optional[Invariants] = None
    defect_chi: Optional[int] = None
    monodromy: Optional[MonodromyCheck] = None
    polyhedron: Optional[LePolyhedron] = None
    collapse: Optional[CollapseSummary] = None
    oracles: List[OracleResult] = Field(default_factory=list)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def _tracker_settings(config: RunConfig, record: bool) -> TrackerSettings:
    return TrackerSettings(
        epsilon=config.epsilon,
        tol_root=config.tol_root,
        cluster_tol=config.cluster_tol,
        max_step=config.max_step,
        min_step=config.min_step,
        escape_margin=config.escape_margin,
        record=record,
    )


def _geometry_settings(config: RunConfig, seed: int) -> GeometrySettings:
    return GeometrySettings(
        epsilon=config.epsilon,
        t_magnitude=config.t_magnitude,
        arg_t=config.arg_t,
        seed=seed,
        tol_root=config.tol_root,
        cluster_tol=config.cluster_tol,
        guard_factor=config.guard_factor,
        escape_margin=config.escape_margin,
        max_retries=config.max_retries,
        grid_refinement=config.grid_refinement,
        workers=config.workers,
    )


class _Run:
    """Mutable state of one run so a failure still reports what was computed."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.report = Report(config=config.echo())
        self.f: Optional[BivariatePoly] = None
        self.g: Optional[BivariatePoly] = None
        self.polar: Optional[BivariatePoly] = None
        self.geometry: Optional[Geometry] = None
        self.tracks: List[LocalMonodromy] = []
        self.outer: Optional[PathTrackResult] = None

    def execute(self) -> Report:
        self.prepare()
        series = self.branches()
        self.track(series)
        self.assemble()
        if self.config.oracle:
            self.run_oracles()
        self.check_consistency()
        return self.report

    def prepare(self) -> None:
        f, g = poly_parse(self.config.f), poly_parse(self.config.g)
        f, g, swapped = normalize_coordinates(f, g)
        self.f, self.g = f, g
        self.report.f, self.report.g = str(f), str(g)
        hypotheses = check_hypotheses(f, g, swapped)
        if g.depends_on("x") and g.depends_on("y"):
            dimension = probe_critical_locus(f, g, self.config.seed)
            hypotheses.messages.append(f"critical locus probe: real dimension {dimension}")
        self.report.hypotheses = hypotheses
        if not hypotheses.passed:
            raise HypothesisError("; ".join(hypotheses.failures()), hypotheses)
        self.report.n = f.degree("x")

    def branches(self) -> List[DiscBranchSeries]:
        polar = polar_curve(self.f, self.g)
        self.report.polar_curve = str(polar)
        branches: List[PuiseuxBranch] = []
        if not polar.is_constant and (0, 0) not in polar.terms:
            self.polar = squarefree_part(polar)
            branches = puiseux_branches(
                self.polar, self.config.trunc, self.config.cluster_tol, self.config.tol_root
            )
        self.report.branches = [b.to_dict() for b in branches]
        logger.info(f"Polar curve {polar}: {len(branches)} branches through the origin")
        return [assemble_v_series(self.f, self.g, b, i) for i, b in enumerate(branches)]

    def track(self, series: List[DiscBranchSeries]) -> None:
        for attempt in range(RESELECTIONS + 1):
            seed = self.config.seed + attempt * RESELECTION_STRIDE
            self.geometry = select_geometry(
                self.f, self.g, series, self.polar, _geometry_settings(self.config, seed)
            )
            try:
                self._track_geometry()
                return
            except (SheetCollisionError, StepUnderflowError) as e:
                if attempt == RESELECTIONS:
                    raise
                logger.warning(f"Tracking failed ({e}); reselecting the base point")

    def _track_geometry(self) -> None:
        geometry = self.geometry
        tracker = SheetTracker(
            self.f, self.g, geometry.t, _tracker_settings(self.config, bool(self.config.csv_path))
        )
        base = tracker.fibre(geometry.lam)

        def lasso(j: int) -> LocalMonodromy:
            point = geometry.points[j]
            return track_special_point(
                tracker,
                j,
                point.kind,
                point.y,
                geometry.guard_radii[j],
                geometry.paths[j].vertices,
                base,
            )

        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            self.tracks = list(pool.map(lasso, range(len(geometry.points))))
        self.outer = outer_loop(tracker, geometry.cut, base)
        self.report.geometry = geometry.to_dict()
        self.report.k = len(geometry.polar_points)
        self.report.escape_count = len(geometry.escape_points)
        logger.info(f"Tracked {len(self.tracks)} lassos and the outer loop")

    def assemble(self) -> None:
        geometry, n = self.geometry, self.report.n
        permutations = [tr.permutation for tr in self.tracks]
        departures = [path.departure for path in geometry.paths]
        if permutations:
            product, order = monodromy_product(permutations, departures, geometry.cut_angle)
        else:
            product, order = Permutation(list(range(n))), []
        outer = self.outer.permutation
        self.report.monodromy = MonodromyCheck(
            status="pass" if product == outer else "fail",
            product=list(product.array_form),
            outer=list(outer.array_form),
            order=order,
        )
        self.report.special_points = [
            self._point_report(tr, departures[tr.index] - geometry.cut_angle)
            for tr in self.tracks
        ]

        polyhedron = build_polyhedron(geometry, self.tracks, n)
        chi, b0, b1 = euler_and_betti(polyhedron)
        self.report.polyhedron = polyhedron
        self.report.invariants = Invariants(
            chi=chi, b0=b0, b1=b1, vertices=len(polyhedron.vertices), edges=len(polyhedron.edges)
        )
        self.report.collapse = collapse_summary(polyhedron)
        self.report.defect_chi = defect_chi(
            n,
            [len(tr.partition) for tr in self.tracks if tr.kind == "polar"],
            [sum(len(o) for o in tr.orbits) for tr in self.tracks if tr.kind == "escape"],
        )
        logger.info(f"χ={chi}, b₀={b0}, b₁={b1}, defect χ={self.report.defect_chi}")
        self.write_artifacts(polyhedron)

    def _point_report(self, track: LocalMonodromy, angle: float) -> SpecialPointReport:
        point = self.geometry.points[track.index]
        return SpecialPointReport(
            index=track.index,
            kind=point.kind,
            y=[point.y.real, point.y.imag],
            branch_id=point.branch_id,
            residual=point.residual if point.kind == "polar" else None,
            guard_radius=self.geometry.guard_radii[track.index],
            departure_angle=angle % (2 * math.pi),
            permutation=list(track.permutation.array_form),
            partition=[list(c) for c in track.partition],
            cluster_count=len(track.partition),
            direct_cluster_count=track.direct_clusters,
            escaping_sheets=[s for s, flag in enumerate(track.escaping) if flag],
            orbit_sizes=[len(o) for o in track.orbits],
        )

    def write_artifacts(self, polyhedron: LePolyhedron) -> None:
        if self.config.dot_path:
            with open(self.config.dot_path, "wb") as handle:
                handle.write(export_graph(polyhedron, "dot"))
            logger.info(f"Wrote DOT graph to {self.config.dot_path}")
        if self.config.csv_path:
            trajectories(self.tracks, self.outer).to_csv(self.config.csv_path, index=False)
            logger.info(f"Wrote trajectories to {self.config.csv_path}")

    def run_oracles(self) -> None:
        f, g, geometry = self.f, self.g, self.geometry
        invariants, n = self.report.invariants, self.report.n
        oracles = self.report.oracles
        if self.report.hypotheses.mode == "holomorphic":
            if (1, 0) in f.terms or (0, 1) in f.terms:
                oracles.append(
                    OracleResult(
                        name="milnor_number",
                        value=0,
                        method="f is smooth at the origin",
                        agrees=invariants.b1 == 0,
                    )
                )
            else:
                mu = milnor_number_resultant(f)
                oracles.append(
                    OracleResult(
                        name="milnor_number",
                        value=mu,
                        method="min over generic coordinates of ord_y Res_x(f_x, f_y)",
                        agrees=invariants.b1 == mu,
                    )
                )
        if str(f) == "x" and str(g) == "y":
            triple = annulus_oracle(geometry.t, geometry.epsilon, geometry.eta1)
            oracles.append(
                OracleResult(
                    name="annulus",
                    value=",".join(map(str, triple)),
                    method="closed-form fibre of x·ȳ = t",
                    agrees=triple == (invariants.chi, invariants.b0, invariants.b1),
                )
            )
        histogram = brute_force_fibre_count(f, g, geometry.t, geometry.epsilon, geometry.eta1)
        mode = histogram_mode(histogram)
        oracles.append(
            OracleResult(
                name="fibre_count_mode",
                value=mode,
                method=f"numpy.roots on a 32×32 y-grid: {json.dumps(histogram)}",
                agrees=mode == n,
            )
        )

    def check_consistency(self) -> None:
        problems = []
        if self.report.defect_chi != self.report.invariants.chi:
            problems.append(
                f"defect χ {self.report.defect_chi} ≠ graph χ {self.report.invariants.chi}"
            )
        if self.report.monodromy.status != "pass":
            problems.append("monodromy product differs from the outer loop")
        if problems:
            raise ConsistencyError("; ".join(problems))


def trajectories(tracks: List[LocalMonodromy], outer: Optional[PathTrackResult]) -> pd.DataFrame:
    """One row per recorded sheet position along every tracked path and loop."""
    results = [(tr.index, tr.path) for tr in tracks] + [(tr.index, tr.loop) for tr in tracks]
    if outer is not None:
        results.append((-1, outer))
    rows = [
        {
            "target": target,
            "kind": result.kind,
            "step": step,
            "s": s,
            "y_re": y.real,
            "y_im": y.imag,
            "sheet": sheet,
            "x_re": x.real,
            "x_im": x.imag,
        }
        for target, result in results
        for step, (s, y, roots) in enumerate(result.samples)
        for sheet, x in enumerate(roots)
    ]
    columns = ["target", "kind", "step", "s", "y_re", "y_im", "sheet", "x_re", "x_im"]
    return pd.DataFrame(rows, columns=columns)


def run_pipeline(config: RunConfig) -> Report:
    """
    Run the whole construction for one configuration.

    Never raises for lepoly failures: the returned report carries status
    "failed", the family exit code and the message, plus everything that
    was computed before the failure.
    """
    run = _Run(config)
    logger.info(f"Running lepoly on f={config.f}, g={config.g}, seed={config.seed}")
    try:
        return run.execute()
    except LepolyError as e:
        logger.error(f"Pipeline failed ({type(e).__name__}): {e}")
        run.report.status = "failed"
        run.report.exit_code = e.exit_code
        run.report.error = str(e)
        return run.report
