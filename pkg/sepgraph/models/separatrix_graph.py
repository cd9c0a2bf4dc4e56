"""
Embedded separatrix graph stored as a rotation system.

Every vertex keeps a tuple of radial slots in counter-clockwise order; a slot
holds a dart id or ``None`` when it is vacant (a defect). Dart ``2e`` and
``2e + 1`` are the two ends of edge ``e``, so ``twin(d) == d ^ 1``. Edge
polylines and mesh paths run from the vertex of dart ``2e`` to the vertex of
dart ``2e + 1``.

All records are frozen; every mutation replaces a table entry through
``_set``/``_delete``, which append the previous value to the innermost open
journal. Undoing a journal restores the exact prior state.
"""
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Tuple

from .quad_mesh import Position, QuadMesh
from ..services.error_handler import ClosedStreamline, InvariantViolation

logger = logging.getLogger(__name__)


class VertexKind(str, Enum):
    """Kind of a graph vertex."""
    SINGULAR3 = "singular3"
    SINGULAR5 = "singular5"
    REGULAR4 = "regular4"

    @property
    def valence(self) -> int:
        return {"singular3": 3, "singular5": 5, "regular4": 4}[self.value]

    @property
    def index(self) -> Fraction:
        return Fraction(4 - self.valence, 4)

    @property
    def is_singular(self) -> bool:
        return self is not VertexKind.REGULAR4

    @classmethod
    def for_valence(cls, valence: int) -> "VertexKind":
        return {3: cls.SINGULAR3, 4: cls.REGULAR4, 5: cls.SINGULAR5}[valence]


class DefectKind(str, Enum):
    S = "S"
    R = "R"


class RepairDirection(str, Enum):
    """Rotation used to pick the edge e' next to a defect."""
    CCW = "ccw"
    CW = "cw"

    @property
    def step(self) -> int:
        return 1 if self is RepairDirection.CCW else -1

    @property
    def other(self) -> "RepairDirection":
        return RepairDirection.CW if self is RepairDirection.CCW else RepairDirection.CCW


class Endpoint(str, Enum):
    FIRST = "first"
    SECOND = "second"


class Transition(str, Enum):
    CROSSES = "crosses"
    TURNS = "turns"


class ProvenanceKind(str, Enum):
    SEPARATRIX = "separatrix"
    NEW_DIAGONAL = "new_diagonal"


@dataclass(frozen=True)
class DeleteConfig:
    """Which S-defect a Delete-separatrix repairs, and how."""
    endpoint: Endpoint
    direction: RepairDirection


ALL_DELETE_CONFIGS: Tuple[DeleteConfig, ...] = tuple(
    DeleteConfig(endpoint, direction)
    for endpoint in (Endpoint.FIRST, Endpoint.SECOND)
    for direction in (RepairDirection.CCW, RepairDirection.CW)
)


@dataclass(frozen=True)
class Provenance:
    kind: ProvenanceKind
    separatrix: Optional[int] = None
    a: Optional[float] = None
    b: Optional[float] = None
    # strip length the drift is measured on; a is the length of the cut edge
    strip_a: Optional[float] = None
    drift: Optional[float] = None


@dataclass(frozen=True)
class GraphVertex:
    id: int
    kind: VertexKind
    mesh_vertex: Optional[int]
    position: Position
    slots: Tuple[Optional[int], ...]

    @property
    def occupied(self) -> List[int]:
        return [d for d in self.slots if d is not None]


@dataclass(frozen=True)
class Dart:
    id: int
    vertex: int
    slot: int

    @property
    def edge(self) -> int:
        return self.id // 2

    @property
    def twin(self) -> int:
        return self.id ^ 1


@dataclass(frozen=True)
class GraphEdge:
    id: int
    length: float
    polyline: Tuple[Position, ...]
    mesh_path: Optional[Tuple[int, ...]]
    provenance: Provenance

    @property
    def darts(self) -> Tuple[int, int]:
        return (2 * self.id, 2 * self.id + 1)


@dataclass(frozen=True)
class Defect:
    vertex: int
    slot: int
    kind: DefectKind
    # edges that left the slot before it opened, starting at the slot
    removed: Tuple[int, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class Separatrix:
    """Chain of edges between two singular endpoints, crossing at regular vertices."""
    id: int
    darts: Tuple[int, ...]  # outgoing dart of every edge, in walk order
    edges: Tuple[int, ...]
    start: Tuple[int, int]  # (vertex, slot)
    end: Tuple[int, int]
    interior: Tuple[int, ...]  # regular vertices crossed, with repetition
    complete: bool = True  # False when the chain stops at a vacant slot

    @property
    def endpoints(self) -> Tuple[int, int]:
        return (self.start[0], self.end[0])


@dataclass(frozen=True)
class WalkStep:
    edge: int
    arrival: int  # dart id at the arrival vertex


_MISSING = object()
TABLES = ("vertices", "darts", "edges", "defects", "counters")


class SeparatrixGraph:
    """Rotation system of separatrix segments embedded on a quad mesh."""

    def __init__(self, mesh: Optional[QuadMesh] = None):
        self.mesh = mesh
        self.vertices: Dict[int, GraphVertex] = {}
        self.darts: Dict[int, Dart] = {}
        self.edges: Dict[int, GraphEdge] = {}
        self.defects: Dict[Tuple[int, int], Defect] = {}
        self.counters: Dict[str, int] = {"vertex": 0, "edge": 0}
        self._journals: List[List[Tuple[str, Any, Any]]] = []
        self._registry: Optional[Dict[int, Separatrix]] = None

    # ------------------------------------------------------------------
    # journal

    def _record(self, table: str, key: Any) -> None:
        if self._journals:
            self._journals[-1].append((table, key, getattr(self, table).get(key, _MISSING)))

    def _set(self, table: str, key: Any, value: Any) -> None:
        self._record(table, key)
        getattr(self, table)[key] = value
        self._registry = None

    def _delete(self, table: str, key: Any) -> None:
        self._record(table, key)
        del getattr(self, table)[key]
        self._registry = None

    def _restore(self, entries: List[Tuple[str, Any, Any]], recorded: bool) -> None:
        for table, key, old in reversed(entries):
            if recorded:
                if old is _MISSING:
                    if key in getattr(self, table):
                        self._delete(table, key)
                else:
                    self._set(table, key, old)
            else:
                store = getattr(self, table)
                if old is _MISSING:
                    store.pop(key, None)
                else:
                    store[key] = old
        self._registry = None

    @contextmanager
    def transaction(self) -> Iterator[List[Tuple[str, Any, Any]]]:
        """Collect undo entries; roll everything back if the block raises."""
        entries: List[Tuple[str, Any, Any]] = []
        self._journals.append(entries)
        try:
            yield entries
        except BaseException:
            self._journals.pop()
            self._restore(entries, recorded=False)
            raise
        self._journals.pop()
        if self._journals:
            self._journals[-1].extend(entries)

    def undo(self, entries: List[Tuple[str, Any, Any]]) -> None:
        """Revert the changes captured by a transaction."""
        self._restore(entries, recorded=True)

    def snapshot(self) -> Dict[str, Dict[Any, Any]]:
        return {table: dict(getattr(self, table)) for table in TABLES}

    def restore_snapshot(self, snapshot: Dict[str, Dict[Any, Any]]) -> None:
        for table in TABLES:
            setattr(self, table, dict(snapshot[table]))
        self._registry = None

    def copy(self) -> "SeparatrixGraph":
        """Independent graph sharing only the immutable mesh."""
        clone = SeparatrixGraph(self.mesh)
        clone.restore_snapshot(self.snapshot())
        return clone

    # ------------------------------------------------------------------
    # primitive mutations

    def _next_id(self, counter: str) -> int:
        value = self.counters[counter]
        self._set("counters", counter, value + 1)
        return value

    def add_vertex(
        self,
        kind: VertexKind,
        position: Position,
        mesh_vertex: Optional[int] = None,
        valence: Optional[int] = None,
    ) -> GraphVertex:
        vid = self._next_id("vertex")
        vertex = GraphVertex(
            id=vid,
            kind=kind,
            mesh_vertex=mesh_vertex,
            position=position,
            slots=(None,) * (valence if valence is not None else kind.valence),
        )
        self._set("vertices", vid, vertex)
        return vertex

    def remove_vertex(self, vid: int) -> None:
        if self.vertices[vid].occupied:
            raise InvariantViolation(f"vertex {vid} still has edges")
        for key in [k for k in self.defects if k[0] == vid]:
            self._delete("defects", key)
        self._delete("vertices", vid)

    def set_slot(self, vid: int, slot: int, dart: Optional[int]) -> None:
        vertex = self.vertices[vid]
        slots = list(vertex.slots)
        slots[slot] = dart
        self._set("vertices", vid, replace(vertex, slots=tuple(slots)))
        if dart is not None:
            self._set("darts", dart, Dart(id=dart, vertex=vid, slot=slot))

    def add_edge(
        self,
        start: Tuple[int, int],
        end: Tuple[int, int],
        length: float,
        polyline: Tuple[Position, ...],
        mesh_path: Optional[Tuple[int, ...]],
        provenance: Provenance,
    ) -> GraphEdge:
        """Create an edge occupying the vacant slots ``start`` and ``end``."""
        for vid, slot in (start, end):
            if self.vertices[vid].slots[slot] is not None:
                raise InvariantViolation(f"slot {slot} of vertex {vid} is occupied")
        if start == end:
            raise InvariantViolation(f"edge cannot occupy slot {start} twice")
        eid = self._next_id("edge")
        edge = GraphEdge(
            id=eid,
            length=float(length),
            polyline=tuple(polyline),
            mesh_path=tuple(mesh_path) if mesh_path is not None else None,
            provenance=provenance,
        )
        self._set("edges", eid, edge)
        self.set_slot(start[0], start[1], 2 * eid)
        self.set_slot(end[0], end[1], 2 * eid + 1)
        return edge

    def update_edge(self, eid: int, **changes: Any) -> GraphEdge:
        """Replace geometry or provenance of an edge; its darts are untouched."""
        edge = replace(self.edges[eid], **changes)
        self._set("edges", eid, edge)
        return edge

    def remove_edge(self, eid: int) -> None:
        for did in self.edges[eid].darts:
            dart = self.darts[did]
            self.set_slot(dart.vertex, dart.slot, None)
            self._delete("darts", did)
        self._delete("edges", eid)

    def add_defect(self, vid: int, slot: int, removed: Tuple[int, ...] = ()) -> Defect:
        vertex = self.vertices[vid]
        if vertex.slots[slot] is not None:
            raise InvariantViolation(f"defect slot {slot} of vertex {vid} is occupied")
        kind = DefectKind.S if vertex.kind.is_singular else DefectKind.R
        defect = Defect(vertex=vid, slot=slot, kind=kind, removed=tuple(removed))
        self._set("defects", (vid, slot), defect)
        return defect

    def remove_defect(self, defect: Defect) -> None:
        self._delete("defects", (defect.vertex, defect.slot))

    # ------------------------------------------------------------------
    # queries

    def twin(self, did: int) -> Dart:
        return self.darts[did ^ 1]

    def dart_at(self, vid: int, slot: int) -> Optional[int]:
        vertex = self.vertices[vid]
        return vertex.slots[slot % len(vertex.slots)]

    def oriented_edge(self, did: int) -> Tuple[Tuple[Position, ...], Optional[Tuple[int, ...]]]:
        """Polyline and mesh path of a dart's edge, oriented away from the dart's vertex."""
        edge = self.edges[did // 2]
        if did % 2 == 0:
            return edge.polyline, edge.mesh_path
        path = tuple(reversed(edge.mesh_path)) if edge.mesh_path is not None else None
        return tuple(reversed(edge.polyline)), path

    def defect_list(self, kind: Optional[DefectKind] = None) -> List[Defect]:
        return [
            self.defects[key]
            for key in sorted(self.defects)
            if kind is None or self.defects[key].kind == kind
        ]

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def regular_count(self) -> int:
        return sum(1 for v in self.vertices.values() if not v.kind.is_singular)

    @property
    def singular_ids(self) -> List[int]:
        return sorted(vid for vid, v in self.vertices.items() if v.kind.is_singular)

    def straight_walk(self, start: int) -> Tuple[List[WalkStep], str]:
        """Follow a dart and cross straight through regular vertices.

        Returns the steps and the stop reason: ``"singular"`` (arrived at a
        singular vertex) or ``"vacant"`` (the straight continuation at a
        regular vertex is a vacant slot).
        """
        steps: List[WalkStep] = []
        seen = set()
        current = start
        while True:
            if current in seen:
                raise ClosedStreamline(
                    f"walk from dart {start} closes without a singularity",
                    cycle=[s.edge for s in steps],
                )
            seen.add(current)
            arrival = self.twin(current)
            steps.append(WalkStep(edge=current // 2, arrival=arrival.id))
            vertex = self.vertices[arrival.vertex]
            if vertex.kind.is_singular:
                return steps, "singular"
            following = vertex.slots[(arrival.slot + 2) % len(vertex.slots)]
            if following is None:
                return steps, "vacant"
            current = following

    @property
    def separatrices(self) -> Dict[int, Separatrix]:
        """Registry of separatrices derived from the current rotation system."""
        if self._registry is None:
            self._registry = self._build_registry()
        return self._registry

    def _build_registry(self) -> Dict[int, Separatrix]:
        chains: Dict[Tuple[int, int], Separatrix] = {}
        seen = set()
        for vid in self.singular_ids:
            for slot, did in enumerate(self.vertices[vid].slots):
                if did is None or (vid, slot) in seen:
                    continue
                steps, reason = self.straight_walk(did)
                out_darts = [did] + [
                    self.dart_at(self.darts[s.arrival].vertex, self.darts[s.arrival].slot + 2)
                    for s in steps[:-1]
                ]
                last = self.darts[steps[-1].arrival]
                start, end = (vid, slot), (last.vertex, last.slot)
                interior = tuple(self.darts[s.arrival].vertex for s in steps[:-1])
                complete = reason == "singular"
                seen.add(start)
                if complete:
                    seen.add(end)
                if complete and end < start:
                    out_darts = [d ^ 1 for d in reversed(out_darts)]
                    start, end = end, start
                    interior = tuple(reversed(interior))
                chains[start] = Separatrix(
                    id=-1,
                    darts=tuple(out_darts),
                    edges=tuple(d // 2 for d in out_darts),
                    start=start,
                    end=end,
                    interior=interior,
                    complete=complete,
                )
        return {
            index: replace(chains[key], id=index)
            for index, key in enumerate(sorted(chains))
        }

    def __repr__(self) -> str:
        return (
            f"SeparatrixGraph(vertices={len(self.vertices)}, edges={len(self.edges)}, "
            f"regular={self.regular_count}, defects={len(self.defects)})"
        )
