import pytest

from sepgraph.models.separatrix_graph import (
    Provenance,
    ProvenanceKind,
    SeparatrixGraph,
    Transition,
    VertexKind,
)
from sepgraph.schemas.graph_report import ViolationKind
from sepgraph.services.error_handler import (
    ClosedStreamline,
    DefectsPresent,
    NotIncident,
    NotRegular,
    SameEdge,
)
from sepgraph.services.mesh_generators import generate_cube_grid, generate_torus_grid
from sepgraph.services.tracing import (
    classify_transition,
    face_census,
    graph_stats,
    trace_separatrices,
    validate_graph,
)

from conftest import brute_force_walks


def _separatrix_paths(graph: SeparatrixGraph):
    paths = set()
    for sep in graph.separatrices.values():
        path = []
        for did in sep.darts:
            _, segment = graph.oriented_edge(did)
            path.extend(segment if not path else segment[1:])
        path = tuple(path)
        paths.add(min(path, tuple(reversed(path))))
    return paths


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_cube_graph(n):
    mesh = generate_cube_grid(n)
    graph = trace_separatrices(mesh)
    assert len(graph.separatrices) == 12
    assert len(graph.singular_ids) == 8
    assert graph.regular_count == 0
    assert all(e.length == n for e in graph.edges.values())
    assert validate_graph(graph).is_valid

    census = face_census(graph)
    assert census.degrees == {4: 6}
    assert census.euler_characteristic == 2

    walks = brute_force_walks(mesh)
    assert set(walks.values()) == {2}
    assert _separatrix_paths(graph) == set(walks)


@pytest.mark.parametrize("rows", range(3, 13))
@pytest.mark.parametrize("cols", range(3, 13))
def test_torus_graph_is_empty(rows, cols):
    graph = trace_separatrices(generate_torus_grid(rows, cols))
    assert graph.is_empty
    assert validate_graph(graph).is_valid
    stats = graph_stats(graph)
    assert stats.singularities == 0
    assert stats.separatrices == 0
    assert stats.regular_vertices == 0


def test_dipole_graph(dipole_mesh, dipole_graph):
    graph = dipole_graph
    assert len(graph.separatrices) == 16
    assert len(graph.singular_ids) == 8
    assert graph.regular_count == 6
    assert len(graph.edges) == 28
    assert validate_graph(graph).is_valid

    census = face_census(graph)
    assert census.degrees == {4: 14}
    assert census.euler_characteristic == 0

    valences = sum(dipole_mesh.valence(graph.vertices[v].mesh_vertex) for v in graph.singular_ids)
    assert valences == 2 * len(graph.separatrices)
    assert _separatrix_paths(graph) == set(brute_force_walks(dipole_mesh))


def test_dipole_chains_cross_at_every_interior_vertex(dipole_graph):
    graph = dipole_graph
    for sep in graph.separatrices.values():
        for e_in, e_out, vid in zip(sep.edges, sep.edges[1:], sep.interior):
            assert classify_transition(graph, e_in, vid, e_out) is Transition.CROSSES


def test_dipole_edges_carry_their_separatrix(dipole_graph):
    graph = dipole_graph
    for sep in graph.separatrices.values():
        for eid in sep.edges:
            assert graph.edges[eid].provenance.kind is ProvenanceKind.SEPARATRIX
            assert graph.edges[eid].provenance.separatrix == sep.id


def test_dipole_stats(dipole_graph):
    stats = graph_stats(dipole_graph)
    assert stats.singularities == 8
    assert stats.separatrices == 16
    assert stats.regular_vertices == 6
    assert stats.euler_characteristic == 0
    assert stats.diagonal_edges == 0
    assert stats.total_drift == 0.0
    assert stats.total_edge_length == sum(e.length for e in dipole_graph.edges.values())


def _regular_vertex(graph: SeparatrixGraph):
    vid = next(v for v in sorted(graph.vertices) if not graph.vertices[v].kind.is_singular)
    return graph.vertices[vid]


def test_classify_transition(dipole_graph):
    vertex = _regular_vertex(dipole_graph)
    e0, e1, e2 = (d // 2 for d in vertex.slots[:3])
    assert classify_transition(dipole_graph, e0, vertex.id, e2) is Transition.CROSSES
    assert classify_transition(dipole_graph, e0, vertex.id, e1) is Transition.TURNS
    assert classify_transition(dipole_graph, e1, vertex.id, e0) is Transition.TURNS


def test_classify_transition_errors(dipole_graph):
    graph = dipole_graph
    vertex = _regular_vertex(graph)
    edge = vertex.slots[0] // 2
    with pytest.raises(SameEdge):
        classify_transition(graph, edge, vertex.id, edge)
    singular = graph.vertices[graph.singular_ids[0]]
    with pytest.raises(NotRegular):
        classify_transition(graph, singular.slots[0] // 2, singular.id, singular.slots[1] // 2)
    own = {d // 2 for d in vertex.occupied}
    stranger = next(e for e in sorted(graph.edges) if e not in own)
    with pytest.raises(NotIncident):
        classify_transition(graph, edge, vertex.id, stranger)


def test_detached_edge_reports_valence_and_vacant_twin(dipole_graph):
    graph = dipole_graph
    edge = next(e for e in graph.edges.values()
                if graph.darts[e.darts[0]].vertex != graph.darts[e.darts[1]].vertex)
    dart = graph.darts[edge.darts[0]]
    graph.set_slot(dart.vertex, dart.slot, None)

    report = validate_graph(graph)
    assert report.count(ViolationKind.VALENCE) == 1
    assert report.count(ViolationKind.VACANT_TWIN) == 1
    assert len(report.violations) == 2


def test_zero_length_edge_is_reported(dipole_graph):
    eid = min(dipole_graph.edges)
    dipole_graph.update_edge(eid, length=0.0)
    report = validate_graph(dipole_graph)
    assert report.count(ViolationKind.EDGE_LENGTH) == 1


def test_defects_block_census_and_validation(dipole_graph):
    graph = dipole_graph
    sep = graph.separatrices[0]
    graph.remove_edge(sep.edges[0])
    graph.add_defect(*sep.start)
    with pytest.raises(DefectsPresent):
        face_census(graph)
    assert validate_graph(graph).count(ViolationKind.DEFECT) == 1


def test_straight_walk_around_a_loop_is_a_closed_streamline():
    graph = SeparatrixGraph()
    vertex = graph.add_vertex(VertexKind.REGULAR4, (0.0, 0.0, 0.0))
    graph.add_edge(
        start=(vertex.id, 0),
        end=(vertex.id, 2),
        length=1.0,
        polyline=((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
        mesh_path=None,
        provenance=Provenance(kind=ProvenanceKind.SEPARATRIX),
    )
    with pytest.raises(ClosedStreamline):
        graph.straight_walk(0)
