"""
Lê polyhedron assembly, invariants and export.
"""

import json
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import networkx as nx
from loguru import logger
from pydantic import BaseModel, Field

from .discriminant import Geometry
from .errors import PolyhedronError
from .tracking import LocalMonodromy

VertexKind = Literal["center", "polar_cluster", "escape_node"]
EdgeKind = Literal["path_lift", "escape_whisker", "circle_arc"]


class Vertex(BaseModel):
    id: str
    kind: VertexKind
    labels: Dict[str, int] = Field(default_factory=dict)


class Edge(BaseModel):
    id: str
    kind: EdgeKind
    endpoints: Tuple[str, str]
    labels: Dict[str, int] = Field(default_factory=dict)


class LePolyhedron(BaseModel):
    """One-dimensional complex: preimage of the path system under φ_t."""

    n: int
    vertices: List[Vertex] = Field(default_factory=list)
    edges: List[Edge] = Field(default_factory=list)
    provenance: str = ""

    def incidence(self) -> Dict[str, List[str]]:
        table: Dict[str, List[str]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            for end in e.endpoints:
                table[end].append(e.id)
        return table


class CollapseSummary(BaseModel):
    vertices: int
    edges: int
    cells: int
    statement: str


def _center(s: int) -> str:
    return f"c{s}"


def build_polyhedron(
    geometry: Optional[Geometry], tracks: Sequence[LocalMonodromy], n: int
) -> LePolyhedron:
    """
    Lift the path system to the fibre.

    Centers are the n sheets over λ_t. A polar point contributes one vertex
    per monodromy cycle and one lift edge per sheet; an escape point
    contributes, per orbit of size o, o attachment vertices joined in a cycle
    of o arcs and o whiskers from the centers.

    Raises:
        PolyhedronError: partition does not cover the n sheets, or an escape
            orbit mixes escaping and non-escaping sheets
    """
    vertices = [Vertex(id=_center(s), kind="center", labels={"sheet": s}) for s in range(n)]
    edges: List[Edge] = []
    for track in sorted(tracks, key=lambda tr: tr.index):
        j = track.index
        partition = track.partition
        if sorted(s for c in partition for s in c) != list(range(n)):
            raise PolyhedronError(f"special point {j}: cluster sizes do not sum to n={n}")
        if track.kind == "polar":
            for c, cycle in enumerate(partition):
                vid = f"p{j}.{c}"
                vertices.append(
                    Vertex(id=vid, kind="polar_cluster", labels={"point": j, "cluster": c})
                )
                for s in cycle:
                    edges.append(
                        Edge(
                            id=f"lift{j}.{s}",
                            kind="path_lift",
                            endpoints=(_center(s), vid),
                            labels={"point": j, "sheet": s},
                        )
                    )
            continue
        for cycle in partition:
            flags = {track.escaping[s] for s in cycle}
            if len(flags) > 1 or (flags == {False} and len(cycle) > 1):
                raise PolyhedronError(
                    f"escape point {j}: orbit {cycle} mixes escaping and bounded sheets"
                )
        for o, orbit in enumerate(track.orbits):
            ids = [f"e{j}.{o}.{k}" for k in range(len(orbit))]
            for k, (s, vid) in enumerate(zip(orbit, ids)):
                labels = {"point": j, "orbit": o, "attachment": k}
                vertices.append(Vertex(id=vid, kind="escape_node", labels=labels))
                edges.append(
                    Edge(
                        id=f"whisker{j}.{s}",
                        kind="escape_whisker",
                        endpoints=(_center(s), vid),
                        labels={"point": j, "sheet": s},
                    )
                )
            for k in range(len(orbit)):
                edges.append(
                    Edge(
                        id=f"arc{j}.{o}.{k}",
                        kind="circle_arc",
                        endpoints=(ids[k], ids[(k + 1) % len(ids)]),
                        labels={"point": j, "orbit": o, "arc": k},
                    )
                )
    provenance = geometry.digest() if geometry is not None else ""
    polyhedron = LePolyhedron(n=n, vertices=vertices, edges=edges, provenance=provenance)
    logger.info(f"Polyhedron: V={len(vertices)}, E={len(edges)}")
    return polyhedron


def to_networkx(P: LePolyhedron) -> nx.MultiGraph:
    graph = nx.MultiGraph()
    for v in P.vertices:
        graph.add_node(v.id, kind=v.kind, **v.labels)
    for e in P.edges:
        graph.add_edge(*e.endpoints, key=e.id, kind=e.kind)
    return graph


def euler_and_betti(P: LePolyhedron) -> Tuple[int, int, int]:
    """(χ, b₀, b₁) of the graph."""
    graph = to_networkx(P)
    v, e = graph.number_of_nodes(), graph.number_of_edges()
    b0 = nx.number_connected_components(graph) if v else 0
    return v - e, b0, e - v + b0


def defect_chi(n: int, cluster_counts: Sequence[int], escape_counts: Sequence[int]) -> int:
    """χ predicted from the covering: n − Σ(n − m_j) − Σ n_e."""
    for m in cluster_counts:
        if m > n or m < 1:
            raise PolyhedronError(f"cluster count {m} outside 1..{n}")
    return n - sum(n - m for m in cluster_counts) - sum(escape_counts)


def export_graph(P: LePolyhedron, format: str = "json") -> bytes:
    """
    Serialize as Graphviz DOT or JSON.

    Raises:
        PolyhedronError: unknown format
    """
    if format == "json":
        chi, b0, b1 = euler_and_betti(P)
        payload = {
            "n": P.n,
            "vertices": [v.model_dump() for v in P.vertices],
            "edges": [{**e.model_dump(), "endpoints": list(e.endpoints)} for e in P.edges],
            "chi": chi,
            "b0": b0,
            "b1": b1,
            "provenance": P.provenance,
        }
        return json.dumps(payload, indent=2).encode()
    if format == "dot":
        lines = ["graph le_polyhedron {"]
        for v in P.vertices:
            label = ",".join(f"{k}={val}" for k, val in v.labels.items())
            lines.append(f'  "{v.id}" [kind="{v.kind}", label="{v.id} {label}"];')
        for e in P.edges:
            a, b = e.endpoints
            lines.append(f'  "{a}" -- "{b}" [id="{e.id}", kind="{e.kind}"];')
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    raise PolyhedronError(f"unknown graph format {format!r}")


def load_graph(data: bytes) -> LePolyhedron:
    """Inverse of the JSON export."""
    try:
        payload = json.loads(data)
        return LePolyhedron(
            n=payload["n"],
            vertices=payload["vertices"],
            edges=payload["edges"],
            provenance=payload.get("provenance", ""),
        )
    except (ValueError, KeyError, TypeError) as e:
        raise PolyhedronError(f"not a polyhedron JSON document: {e}") from e


def collapse_summary(P: LePolyhedron) -> CollapseSummary:
    if not P.vertices:
        raise PolyhedronError("polyhedron must be nonempty")
    v, e = len(P.vertices), len(P.edges)
    return CollapseSummary(
        vertices=v,
        edges=e,
        cells=v + e,
        statement=f"{v} vertices + {e} edges ↦ {{0}}; complement maps homeomorphically",
    )

