"""
Rewrite engine for separatrix graphs.

Delete-separatrix removes a separatrix, opens one S-defect at each endpoint
and repairs one of them, which leaves a persistent R-defect whose dangling
branch stays in the graph. Switch-separatrix repairs the remaining S-defect
and deletes the dangling branch of the cut it made; the branch either ends at
a singular vertex (a new S-defect, the macro-operation continues) or runs into
the persistent R-defect along its severed line (both defects vanish).

Every operation runs inside a graph transaction and returns an
``OperationRecord`` whose journal undoes it exactly.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..config import get_settings
from ..models.separatrix_graph import (
    Defect,
    DefectKind,
    DeleteConfig,
    Endpoint,
    Provenance,
    ProvenanceKind,
    RepairDirection,
    SeparatrixGraph,
)
from ..schemas.operation_log import (
    DefectRef,
    OperationLogEntry,
    OperationOutcome,
    OperationType,
)
from .drift import RegionQ, embed_diagonal, locate_repair, region_for_site
from .error_handler import (
    ClosedStreamline,
    DanglingBlocked,
    DefectsPresent,
    InvariantViolation,
    RepairBlocked,
    RepairImpossible,
    Stuck,
)

logger = logging.getLogger(__name__)

Chooser = Callable[[SeparatrixGraph, Defect], RepairDirection]


@dataclass(frozen=True)
class RepairOutcome:
    defect: Defect
    direction: RepairDirection
    cut_edge: int
    new_edge: int
    new_defect: Defect
    dangling: Tuple[int, int]  # (v', dart leaving v' along the severed line)
    region: RegionQ


@dataclass
class OperationRecord:
    """An applied atomic operation and what it takes to revert it."""
    entry: OperationLogEntry
    journal: List[Tuple[str, Any, Any]] = field(default_factory=list, repr=False)
    snapshot: Optional[Dict[str, Dict[Any, Any]]] = field(default=None, repr=False)
    frozen: FrozenSet[Any] = frozenset()  # sibling options that had already failed


class MacroStatus(str, Enum):
    SIMPLIFIED = "simplified"
    NOT_APPLICABLE = "not_applicable"


@dataclass
class MacroResult:
    status: MacroStatus
    records: List[OperationRecord] = field(default_factory=list)

    @property
    def log(self) -> List[OperationLogEntry]:
        return [r.entry for r in self.records]

    @property
    def switches(self) -> int:
        return sum(1 for r in self.records if r.entry.op is OperationType.SWITCH)


def _defect_ref(defect: Defect) -> DefectRef:
    return DefectRef(vertex=defect.vertex, slot=defect.slot, kind=defect.kind)


def _take_snapshot(graph: SeparatrixGraph) -> Optional[Dict[str, Dict[Any, Any]]]:
    return graph.snapshot() if get_settings().SNAPSHOT_UNDO else None


def repair_defect(graph: SeparatrixGraph, defect: Defect, direction: RepairDirection) -> RepairOutcome:
    """Close a defect by cutting the separatrix through its neighbour v'.

    The edge e'' leaving v' is replaced by a new edge from the defect slot to
    v''; v' keeps a vacant slot where e'' was.
    """
    if graph.defects.get((defect.vertex, defect.slot)) != defect:
        raise InvariantViolation(f"{defect} is not a defect of this graph")
    with graph.transaction():
        site = locate_repair(graph, defect, direction)
        region = region_for_site(graph, site)
        graph.remove_defect(defect)
        graph.remove_edge(site.cut_dart // 2)
        edge = graph.add_edge(
            start=(defect.vertex, defect.slot),
            end=(site.v_second, site.far_slot),
            length=region.new_edge_length,
            polyline=region.boundary,
            mesh_path=None,
            provenance=Provenance(kind=ProvenanceKind.NEW_DIAGONAL),
        )
        embed_diagonal(graph, region, edge.id)
        new_defect = graph.add_defect(site.v_prime, site.cut_slot, removed=(site.cut_dart // 2,))
        dangling = graph.dart_at(site.v_prime, site.cut_slot + 2)
    logger.debug(
        f"Repaired {defect.kind.value}-defect at vertex {defect.vertex} ({direction.value}): "
        f"cut edge {site.cut_dart // 2}, new edge {edge.id}, drift {region.drift:.4f}"
    )
    return RepairOutcome(
        defect=defect,
        direction=direction,
        cut_edge=site.cut_dart // 2,
        new_edge=edge.id,
        new_defect=new_defect,
        dangling=(site.v_prime, dangling),
        region=region,
    )


def _merged_provenance(first: Provenance, second: Provenance) -> Provenance:
    diagonals = [p for p in (first, second) if p.kind is ProvenanceKind.NEW_DIAGONAL]
    if not diagonals:
        return first
    return max(diagonals, key=lambda p: p.drift or 0.0)


def _merge_through(graph: SeparatrixGraph, d1: int, d2: int) -> int:
    """Join the edges of two opposite darts at one vertex into a single edge."""
    far1, far2 = graph.twin(d1), graph.twin(d2)
    poly1, path1 = graph.oriented_edge(far1.id)
    poly2, path2 = graph.oriented_edge(d2)
    e1, e2 = graph.edges[d1 // 2], graph.edges[d2 // 2]
    start, end = (far1.vertex, far1.slot), (far2.vertex, far2.slot)
    graph.remove_edge(e1.id)
    graph.remove_edge(e2.id)
    merged = graph.add_edge(
        start=start,
        end=end,
        length=e1.length + e2.length,
        polyline=tuple(poly1) + tuple(poly2[1:]),
        mesh_path=tuple(path1) + tuple(path2[1:]) if path1 is not None and path2 is not None else None,
        provenance=_merged_provenance(e1.provenance, e2.provenance),
    )
    return merged.id


def _dissolve(graph: SeparatrixGraph, vid: int, notes: List[str]) -> None:
    """Remove a regular vertex that lost one or both of its lines."""
    vertex = graph.vertices[vid]
    occupied = [(slot, did) for slot, did in enumerate(vertex.slots) if did is not None]
    if not occupied:
        notes.append(f"vertex {vid} crossed by a single separatrix removed without merge")
    elif len(occupied) == 2 and (occupied[1][0] - occupied[0][0]) % len(vertex.slots) == 2:
        d1, d2 = occupied[0][1], occupied[1][1]
        if d1 // 2 == d2 // 2:
            raise InvariantViolation(f"line through vertex {vid} closes on itself")
        _merge_through(graph, d1, d2)
    else:
        raise InvariantViolation(
            f"vertex {vid} cannot be dissolved with darts in slots {[s for s, _ in occupied]}"
        )
    graph.remove_vertex(vid)


def delete_separatrix(
    graph: SeparatrixGraph,
    separatrix: int,
    config: DeleteConfig,
    macro: int = 0,
) -> OperationRecord:
    """Remove a separatrix and repair the endpoint chosen by ``config``.

    Leaves the other endpoint's S-defect and the repair's R-defect.
    """
    if graph.defects:
        raise DefectsPresent(f"cannot delete separatrix {separatrix} with {len(graph.defects)} defects")
    registry = graph.separatrices
    if separatrix not in registry:
        raise InvariantViolation(f"unknown separatrix {separatrix}")
    sep = registry[separatrix]
    snapshot = _take_snapshot(graph)
    notes: List[str] = []
    with graph.transaction() as journal:
        for eid in sep.edges:
            graph.remove_edge(eid)
        crossed = list(dict.fromkeys(sep.interior))
        for vid in crossed:
            _dissolve(graph, vid, notes)
        first = graph.add_defect(*sep.start, removed=sep.edges)
        second = graph.add_defect(*sep.end, removed=tuple(reversed(sep.edges)))
        target = first if config.endpoint is Endpoint.FIRST else second
        try:
            outcome = repair_defect(graph, target, config.direction)
        except RepairBlocked as e:
            raise RepairImpossible(
                f"separatrix {separatrix}: {config.endpoint.value} endpoint cannot be repaired "
                f"{config.direction.value}: {e}"
            ) from e

    entry = OperationLogEntry(
        op=OperationType.DELETE,
        macro=macro,
        separatrix=separatrix,
        endpoint=config.endpoint,
        direction=config.direction,
        defect=_defect_ref(target),
        cut_edge=outcome.cut_edge,
        new_edge=outcome.new_edge,
        removed_vertices=len(crossed),
        drift=outcome.region.drift,
        outcome=OperationOutcome.PENDING,
        notes=notes,
    )
    return OperationRecord(entry=entry, journal=journal, snapshot=snapshot)


def switch_separatrix(
    graph: SeparatrixGraph,
    direction: RepairDirection,
    macro: int = 0,
) -> OperationRecord:
    """Repair the S-defect in ``direction`` and delete the dangling branch of the cut."""
    s_defects = graph.defect_list(DefectKind.S)
    r_defects = graph.defect_list(DefectKind.R)
    if len(s_defects) != 1 or len(r_defects) != 1:
        raise InvariantViolation(
            f"switch needs one S-defect and one R-defect, found {len(s_defects)} and {len(r_defects)}"
        )
    persistent = r_defects[0]
    snapshot = _take_snapshot(graph)
    notes: List[str] = []
    with graph.transaction() as journal:
        outcome = repair_defect(graph, s_defects[0], direction)
        start_vertex, start_dart = outcome.dangling
        try:
            steps, reason = graph.straight_walk(start_dart)
        except ClosedStreamline as e:
            raise DanglingBlocked(f"dangling branch from vertex {start_vertex} never ends") from e

        crossed = [start_vertex]
        for step in steps[:-1]:
            vid = graph.darts[step.arrival].vertex
            if vid == persistent.vertex:
                logger.warning(
                    f"Dangling branch from vertex {start_vertex} crosses the R-defect at vertex {vid}"
                )
                raise DanglingBlocked(f"dangling branch crosses the R-defect at vertex {vid}")
            crossed.append(vid)
        last = graph.darts[steps[-1].arrival]
        end_vertex, end_slot = last.vertex, last.slot
        if reason == "vacant" and end_vertex != persistent.vertex:
            raise InvariantViolation(f"dangling branch stops at unexpected vacancy of vertex {end_vertex}")

        for step in steps:
            graph.remove_edge(step.edge)
        for vid in dict.fromkeys(crossed):
            _dissolve(graph, vid, notes)

        if reason == "singular":
            branch = tuple(s.edge for s in reversed(steps))
            new_defect = graph.add_defect(end_vertex, end_slot, removed=branch)
            result = OperationOutcome.PENDING
            notes.append(f"S-defect moved to vertex {new_defect.vertex} slot {new_defect.slot}")
            removed = len(set(crossed))
        else:
            _dissolve(graph, end_vertex, notes)
            result = OperationOutcome.TERMINATED
            removed = len(set(crossed)) + 1

    entry = OperationLogEntry(
        op=OperationType.SWITCH,
        macro=macro,
        direction=direction,
        defect=_defect_ref(outcome.defect),
        cut_edge=outcome.cut_edge,
        new_edge=outcome.new_edge,
        removed_vertices=removed,
        drift=outcome.region.drift,
        outcome=result,
        notes=notes,
    )
    return OperationRecord(entry=entry, journal=journal, snapshot=snapshot)


def undo_record(graph: SeparatrixGraph, record: OperationRecord) -> None:
    if record.snapshot is not None:
        graph.restore_snapshot(record.snapshot)
    else:
        graph.undo(record.journal)


def undo_records(graph: SeparatrixGraph, records: Sequence[OperationRecord]) -> None:
    """Revert a stack of applied operations, most recent first."""
    for record in reversed(records):
        undo_record(graph, record)


def macro_operation(
    graph: SeparatrixGraph,
    separatrix: int,
    config: DeleteConfig,
    chooser: Chooser,
    macro: int = 0,
) -> MacroResult:
    """One Delete-separatrix followed by Switch-separatrix steps until no defect remains.

    Switch directions come from ``chooser``; the other direction is tried when
    the preferred one is blocked. On ``Stuck`` the graph is restored and the
    partial log travels with the exception.
    """
    if graph.regular_count == 0:
        return MacroResult(status=MacroStatus.NOT_APPLICABLE)

    limit = graph.regular_count
    records: List[OperationRecord] = []
    try:
        try:
            records.append(delete_separatrix(graph, separatrix, config, macro=macro))
        except RepairImpossible as e:
            raise Stuck(str(e), log=[]) from e
        while records[-1].entry.outcome is OperationOutcome.PENDING:
            if len(records) > limit:
                raise InvariantViolation(f"macro-operation exceeded {limit} switches")
            preferred = chooser(graph, graph.defect_list(DefectKind.S)[0])
            for direction in (preferred, preferred.other):
                try:
                    records.append(switch_separatrix(graph, direction, macro=macro))
                    break
                except RepairBlocked as e:
                    logger.debug(f"Switch {direction.value} blocked: {e}")
            else:
                raise Stuck(
                    f"S-defect cannot be repaired in either direction after {len(records)} operations",
                    log=[r.entry for r in records],
                )
    except Stuck:
        undo_records(graph, records)
        raise

    result = MacroResult(status=MacroStatus.SIMPLIFIED, records=records)
    logger.info(
        f"Macro-operation on separatrix {separatrix} finished after {result.switches} switches; "
        f"{graph.regular_count} regular vertices remain"
    )
    return result


def apply_log(graph: SeparatrixGraph, entries: Sequence[OperationLogEntry]) -> List[OperationRecord]:
    """Replay a serialized operation log on the graph it was recorded from."""
    records: List[OperationRecord] = []
    for index, entry in enumerate(entries):
        if entry.op is OperationType.DELETE:
            record = delete_separatrix(
                graph,
                entry.separatrix,
                DeleteConfig(entry.endpoint, entry.direction),
                macro=entry.macro,
            )
        else:
            record = switch_separatrix(graph, entry.direction, macro=entry.macro)
        if record.entry.outcome != entry.outcome:
            raise InvariantViolation(
                f"replay diverged at entry {index}: expected {entry.outcome.value}, "
                f"got {record.entry.outcome.value}"
            )
        records.append(record)
    return records
