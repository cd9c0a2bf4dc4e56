"""
Separatrix tracing on quad meshes and structural checks on the resulting graph.
"""
import logging
import math
from collections import Counter
from typing import Dict, List, Set, Tuple

from ..config import get_settings
from ..models.quad_mesh import QuadMesh
from ..models.separatrix_graph import (
    Provenance,
    ProvenanceKind,
    SeparatrixGraph,
    Transition,
    VertexKind,
)
from ..schemas.graph_report import (
    FaceCensus,
    GraphStats,
    ValidationReport,
    Violation,
    ViolationKind,
)
from .error_handler import (
    ClosedStreamline,
    DefectsPresent,
    NotIncident,
    NotRegular,
    SameEdge,
)

logger = logging.getLogger(__name__)

MeshDart = Tuple[int, int]  # (mesh vertex, radial slot)


def _walk_mesh(mesh: QuadMesh, start: int, first: int, max_steps: int) -> List[int]:
    """Mesh vertices visited from ``start`` through ``first`` until an irregular vertex."""
    path = [start, first]
    prev, current = start, first
    while mesh.valence(current) == 4:
        if len(path) > max_steps:
            raise ClosedStreamline(
                f"streamline from vertex {start} towards {first} never meets a singularity",
                cycle=path,
            )
        prev, current = current, mesh.straight_next(prev, current)
        path.append(current)
    return path


def _trace_mesh_paths(mesh: QuadMesh) -> Dict[MeshDart, List[int]]:
    """One mesh path per separatrix, keyed by its smaller end (vertex, slot)."""
    max_steps = min(get_settings().MAX_WALK_STEPS, 2 * mesh.edge_count + 2)
    paths: Dict[MeshDart, List[int]] = {}
    walks = 0
    for s, ring in enumerate(mesh.rings):
        if len(ring) == 4:
            continue
        for slot, neighbor in enumerate(ring):
            path = _walk_mesh(mesh, s, neighbor, max_steps)
            walks += 1
            start = (s, slot)
            end = (path[-1], mesh.slot_of(path[-1], path[-2]))
            if end < start:
                start, path = end, list(reversed(path))
            paths.setdefault(start, path)
    if walks != 2 * len(paths):
        raise ClosedStreamline(
            f"{walks} walks do not pair up into {len(paths)} separatrices"
        )
    return paths


def trace_separatrices(mesh: QuadMesh) -> SeparatrixGraph:
    """Build the graph of separatrices induced by the irregular vertices of a mesh.

    Returns an empty graph when the mesh has no singularities.
    """
    graph = SeparatrixGraph(mesh)
    if all(len(ring) == 4 for ring in mesh.rings):
        logger.info("Mesh has no irregular vertices; separatrix graph is empty")
        return graph

    paths = _trace_mesh_paths(mesh)
    ordered = [paths[key] for key in sorted(paths)]

    # a regular mesh vertex becomes a graph vertex when both of its lines are used
    lines: Dict[int, Set[int]] = {}
    for path in ordered:
        for prev, x in zip(path, path[1:-1]):
            lines.setdefault(x, set()).add(mesh.slot_of(x, prev) % 2)
    crossings = {x for x, used in lines.items() if len(used) == 2}

    graph_ids: Dict[int, int] = {}
    for path in ordered:
        for x in path:
            if x in graph_ids or (mesh.valence(x) == 4 and x not in crossings):
                continue
            kind = VertexKind.for_valence(mesh.valence(x))
            graph_ids[x] = graph.add_vertex(kind, mesh.positions[x], mesh_vertex=x).id

    placeholder = Provenance(kind=ProvenanceKind.SEPARATRIX)
    for path in ordered:
        cuts = [i for i, x in enumerate(path) if i in (0, len(path) - 1) or x in crossings]
        for i0, i1 in zip(cuts, cuts[1:]):
            a, b = path[i0], path[i1]
            segment = tuple(path[i0:i1 + 1])
            graph.add_edge(
                start=(graph_ids[a], mesh.slot_of(a, path[i0 + 1])),
                end=(graph_ids[b], mesh.slot_of(b, path[i1 - 1])),
                length=float(i1 - i0),
                polyline=tuple(mesh.positions[x] for x in segment),
                mesh_path=segment,
                provenance=placeholder,
            )

    for sep in graph.separatrices.values():
        for eid in sep.edges:
            graph.update_edge(eid, provenance=Provenance(kind=ProvenanceKind.SEPARATRIX, separatrix=sep.id))

    logger.info(
        f"Traced {len(ordered)} separatrices: {len(graph.singular_ids)} singular, "
        f"{graph.regular_count} regular vertices"
    )
    return graph


def classify_transition(graph: SeparatrixGraph, edge_in: int, vertex: int, edge_out: int) -> Transition:
    """Whether a chain entering ``vertex`` by ``edge_in`` and leaving by ``edge_out`` crosses or turns."""
    v = graph.vertices[vertex]
    if v.kind.is_singular:
        raise NotRegular(f"vertex {vertex} is {v.kind.value}")
    if edge_in == edge_out:
        raise SameEdge(f"edge {edge_in} used to enter and leave vertex {vertex}")
    slots: Dict[int, int] = {}
    for slot, did in enumerate(v.slots):
        if did is not None:
            slots.setdefault(did // 2, slot)
    if edge_in not in slots or edge_out not in slots:
        raise NotIncident(f"edges {edge_in}, {edge_out} are not both incident to vertex {vertex}")
    delta = (slots[edge_out] - slots[edge_in]) % 4
    return Transition.CROSSES if delta == 2 else Transition.TURNS


def _face_cycles(graph: SeparatrixGraph) -> List[List[int]]:
    """Boundary cycles of the rotation system; each face lies left of its darts."""
    cycles = []
    visited: Set[int] = set()
    for start in sorted(graph.darts):
        if start in visited:
            continue
        cycle = []
        did = start
        while did not in visited:
            visited.add(did)
            cycle.append(did)
            arrival = graph.twin(did)
            vertex = graph.vertices[arrival.vertex]
            valence = len(vertex.slots)
            slot = arrival.slot
            for _ in range(valence):
                slot = (slot - 1) % valence
                if vertex.slots[slot] is not None:
                    break
            did = vertex.slots[slot]
        cycles.append(cycle)
    return cycles


def face_census(graph: SeparatrixGraph) -> FaceCensus:
    """Face degree multiset and Euler characteristic of the embedded graph."""
    if graph.defects:
        raise DefectsPresent(f"face census needs a defect-free graph ({len(graph.defects)} defects)")
    cycles = _face_cycles(graph)
    degrees = Counter(len(cycle) for cycle in cycles)
    return FaceCensus(
        degrees=dict(sorted(degrees.items())),
        face_count=len(cycles),
        euler_characteristic=len(graph.vertices) - len(graph.edges) + len(cycles),
    )


def validate_graph(graph: SeparatrixGraph) -> ValidationReport:
    """Check quad faces, vertex valences, separatrix chains and the rotation-system invariants."""
    violations: List[Violation] = []

    for key in sorted(graph.defects):
        defect = graph.defects[key]
        violations.append(Violation(
            kind=ViolationKind.DEFECT,
            detail=f"{defect.kind.value}-defect at slot {defect.slot}",
            vertex=defect.vertex,
        ))

    for vid in sorted(graph.vertices):
        vertex = graph.vertices[vid]
        expected = vertex.kind.valence
        occupied = len(vertex.occupied)
        if len(vertex.slots) != expected or occupied != expected:
            violations.append(Violation(
                kind=ViolationKind.VALENCE,
                detail=f"{vertex.kind.value} vertex has {occupied} edges in {len(vertex.slots)} slots",
                vertex=vid,
            ))
        for slot, did in enumerate(vertex.slots):
            if did is None:
                continue
            dart = graph.darts.get(did)
            if dart is None or dart.vertex != vid or dart.slot != slot:
                violations.append(Violation(
                    kind=ViolationKind.RADIAL_SLOT,
                    detail=f"slot {slot} holds dart {did} registered elsewhere",
                    vertex=vid,
                ))
                continue
            twin = graph.darts.get(did ^ 1)
            if twin is None or graph.vertices.get(twin.vertex) is None \
                    or graph.vertices[twin.vertex].slots[twin.slot] != twin.id:
                violations.append(Violation(
                    kind=ViolationKind.VACANT_TWIN,
                    detail=f"dart {did} has no attached twin",
                    vertex=vid,
                    edge=did // 2,
                ))

    for eid in sorted(graph.edges):
        edge = graph.edges[eid]
        if not edge.length > 0:
            violations.append(Violation(
                kind=ViolationKind.EDGE_LENGTH, detail=f"length {edge.length}", edge=eid,
            ))
        ends = [graph.darts.get(d) for d in edge.darts]
        if edge.polyline and all(ends):
            for point, dart in ((edge.polyline[0], ends[0]), (edge.polyline[-1], ends[1])):
                position = graph.vertices[dart.vertex].position
                if not all(math.isclose(p, q, abs_tol=1e-9) for p, q in zip(point, position)):
                    violations.append(Violation(
                        kind=ViolationKind.EMBEDDING,
                        detail=f"polyline end {point} is not at vertex {dart.vertex}",
                        edge=eid,
                    ))

    if violations:
        return ValidationReport(violations=violations)

    for cycle in _face_cycles(graph):
        if len(cycle) != 4:
            violations.append(Violation(
                kind=ViolationKind.FACE_DEGREE,
                detail=f"face through darts {cycle[:8]} has degree {len(cycle)}",
                edge=cycle[0] // 2,
            ))

    try:
        registry = graph.separatrices
    except ClosedStreamline as e:
        violations.append(Violation(kind=ViolationKind.SEPARATRIX_CHAIN, detail=str(e)))
        return ValidationReport(violations=violations)

    covered: Counter = Counter()
    for sep in registry.values():
        covered.update(sep.edges)
        if not sep.complete:
            violations.append(Violation(
                kind=ViolationKind.SEPARATRIX_CHAIN,
                detail=f"separatrix {sep.id} stops at regular vertex {sep.end[0]}",
                vertex=sep.end[0],
            ))
    for eid in sorted(graph.edges):
        if covered[eid] != 1:
            violations.append(Violation(
                kind=ViolationKind.UNCOVERED_EDGE,
                detail=f"edge lies on {covered[eid]} separatrices",
                edge=eid,
            ))

    return ValidationReport(violations=violations)


def graph_stats(graph: SeparatrixGraph) -> GraphStats:
    """Summary counts used by the CLI and the per-step statistics."""
    diagonals = [e for e in graph.edges.values() if e.provenance.kind == ProvenanceKind.NEW_DIAGONAL]
    chi = None
    if not graph.defects:
        chi = face_census(graph).euler_characteristic
    return GraphStats(
        singularities=len(graph.singular_ids),
        separatrices=len(graph.separatrices),
        regular_vertices=graph.regular_count,
        edges=len(graph.edges),
        total_edge_length=sum(e.length for e in graph.edges.values()),
        euler_characteristic=chi,
        diagonal_edges=len(diagonals),
        total_drift=sum(e.provenance.drift or 0.0 for e in diagonals),
        defects=len(graph.defects),
    )
