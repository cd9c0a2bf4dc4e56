"""Random delete/switch sequences, greedy runs and oracle searches on random dislocation meshes.

Meshes are torus grids of up to 10x10 with one to four dislocation pairs in
disjoint column bands. Random histories must keep the token invariants after
every step, replay from their log onto a fresh copy, and undo back to the
traced graph byte for byte. Greedy logs must replay to the greedy result, and
the oracle must never lose to a single greedy step.
"""
import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from sepgraph.models.separatrix_graph import ALL_DELETE_CONFIGS, DefectKind, RepairDirection
from sepgraph.schemas.operation_log import OperationOutcome, OracleStatus, StopReason
from sepgraph.schemas.search_config import EnergyConfig, StopCriteria
from sepgraph.services.error_handler import ClosedStreamline, RepairBlocked, RepairImpossible
from sepgraph.services.mesh_generators import generate_dipole_grid
from sepgraph.services.operations import (
    apply_log,
    delete_separatrix,
    switch_separatrix,
    undo_records,
)
from sepgraph.services.search import energy_of, greedy_simplify, oracle_report
from sepgraph.services.tracing import face_census, trace_separatrices, validate_graph

from conftest import dump

ORACLE_NODE_BUDGET = 50_000


@st.composite
def dipole_meshes(draw, min_sites=1, max_sites=4):
    rows = draw(st.integers(min_value=5, max_value=10))
    cols = draw(st.integers(min_value=max(5, 2 * min_sites), max_value=10))
    wanted = draw(st.integers(min_value=min_sites, max_value=max_sites))
    used = set()
    sites = []
    for _ in range(wanted):
        free = [j for j in range(cols) if not {j, (j + 1) % cols} & used]
        if not free:
            break
        j = draw(st.sampled_from(free))
        used |= {j, (j + 1) % cols}
        sites.append((draw(st.integers(min_value=0, max_value=rows - 1)), j))
    return generate_dipole_grid(rows, cols, sites)


def _traced(mesh):
    try:
        return trace_separatrices(mesh)
    except ClosedStreamline:
        assume(False)


def _counts(graph):
    return len(graph.defect_list(DefectKind.S)), len(graph.defect_list(DefectKind.R))


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(mesh=dipole_meshes(), data=st.data())
def test_random_macro_operations_keep_invariants(mesh, data):
    graph = _traced(mesh)
    initial = dump(graph)
    traced = graph.copy()
    singular = graph.singular_ids
    separatrices = len(graph.separatrices)
    history = []

    for _ in range(data.draw(st.integers(min_value=1, max_value=4))):
        regular = graph.regular_count
        if regular == 0:
            break
        before = dump(graph)
        separatrix = data.draw(st.sampled_from(sorted(graph.separatrices)))
        config = data.draw(st.sampled_from(ALL_DELETE_CONFIGS))
        try:
            macro = [delete_separatrix(graph, separatrix, config)]
        except RepairImpossible:
            assert dump(graph) == before
            continue
        assert _counts(graph) == (1, 1)

        while macro[-1].entry.outcome is OperationOutcome.PENDING:
            assert len(macro) <= regular + 1
            preferred = data.draw(st.sampled_from(list(RepairDirection)))
            record = None
            for direction in (preferred, preferred.other):
                try:
                    record = switch_separatrix(graph, direction)
                    break
                except RepairBlocked:
                    continue
            if record is None:
                undo_records(graph, macro)
                assert dump(graph) == before
                macro = []
                break
            macro.append(record)
            if record.entry.outcome is OperationOutcome.PENDING:
                assert _counts(graph) == (1, 1)

        if not macro:
            continue
        assert _counts(graph) == (0, 0)
        assert validate_graph(graph).is_valid
        assert set(face_census(graph).degrees) == {4}
        assert graph.singular_ids == singular
        assert len(graph.separatrices) == separatrices
        assert graph.regular_count < regular
        assert len(macro) - 1 <= regular
        history.extend(macro)

    apply_log(traced, [r.entry for r in history])
    assert dump(traced) == dump(graph)

    undo_records(graph, history)
    assert dump(graph) == initial


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(mesh=dipole_meshes())
def test_greedy_logs_replay_on_random_meshes(mesh):
    graph = _traced(mesh)
    before = dump(graph)
    result = greedy_simplify(graph, StopCriteria(target_regular=0))
    assert dump(graph) == before

    assert validate_graph(result.graph).is_valid
    regular = [row.regular_vertices for row in result.trace]
    assert all(a > b for a, b in zip(regular, regular[1:]))
    assert result.stop_reason in (StopReason.TARGET_REACHED, StopReason.NO_PROGRESS)
    assert (result.stop_reason is StopReason.TARGET_REACHED) == (regular[-1] == 0)

    replayed = graph.copy()
    apply_log(replayed, result.log)
    assert dump(replayed) == dump(result.graph)


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
@given(mesh=dipole_meshes(min_sites=2, max_sites=3))
def test_oracle_never_loses_to_greedy_on_random_meshes(mesh):
    graph = _traced(mesh)
    assume(0 < graph.regular_count <= 40)
    report = oracle_report(graph, EnergyConfig(), ORACLE_NODE_BUDGET)
    assume(report.status is not OracleStatus.BUDGET_EXCEEDED)

    assert report.input_energy == energy_of(graph, EnergyConfig())
    if report.greedy_log:
        assert report.status is OracleStatus.SOLVED
    if report.status is OracleStatus.SOLVED:
        assert report.energy_gap >= -1e-9
        replayed = graph.copy()
        apply_log(replayed, report.oracle_log)
        assert validate_graph(replayed).is_valid
        assert energy_of(replayed, EnergyConfig()) == pytest.approx(report.oracle_energy)
