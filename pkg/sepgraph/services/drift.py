"""
Drift of candidate repairs and the staircase embedding of new diagonal edges.

A repair at a defect of vertex ``v`` walks to the neighbouring edge ``e'``
(towards ``v'``) and then to the edge ``e''`` leaving ``v'`` in the same
rotation (towards ``v''``). Together they bound a strip whose long side runs
from ``v'`` through ``e''`` to the next singular vertex.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from ..models.quad_mesh import Position, QuadMesh
from ..models.separatrix_graph import (
    Defect,
    Provenance,
    ProvenanceKind,
    RepairDirection,
    SeparatrixGraph,
)
from .error_handler import (
    InvariantViolation,
    LoopEdge,
    NeighborDefective,
    NeighborSingular,
    NonPositiveDimension,
    NotAGrid,
)

logger = logging.getLogger(__name__)


def drift_value(a: float, b: float) -> float:
    """Area of an a x b strip over the squared length of its diagonal."""
    if not (a > 0 and b > 0):
        raise NonPositiveDimension(f"strip dimensions must be positive, got a={a}, b={b}")
    return (a * b) / (a * a + b * b)


@dataclass(frozen=True)
class RepairSite:
    """Darts and vertices touched by repairing one defect in one direction."""
    defect: Defect
    direction: RepairDirection
    side_dart: int  # e' at v
    v_prime: int
    cut_dart: int  # e'' at v'
    cut_slot: int  # slot of e'' at v'
    v_second: int
    far_slot: int  # slot of e'' at v''


def locate_repair(graph: SeparatrixGraph, defect: Defect, direction: RepairDirection) -> RepairSite:
    """Find e', v', e'' and v'' for a repair, or say why this option is blocked."""
    vid, slot = defect.vertex, defect.slot
    if graph.dart_at(vid, slot) is not None:
        raise InvariantViolation(f"slot {slot} of vertex {vid} is not vacant")
    step = direction.step
    side_dart = graph.dart_at(vid, slot + step)
    if side_dart is None:
        raise NeighborDefective(
            f"slot next to the defect at vertex {vid} is vacant ({direction.value})"
        )
    arrival = graph.twin(side_dart)
    v_prime = graph.vertices[arrival.vertex]
    if v_prime.kind.is_singular:
        raise NeighborSingular(
            f"{direction.value} neighbour {v_prime.id} of vertex {vid} is singular"
        )
    if len(v_prime.occupied) != len(v_prime.slots):
        raise NeighborDefective(f"{direction.value} neighbour {v_prime.id} carries a defect")
    cut_slot = (arrival.slot + step) % len(v_prime.slots)
    cut_dart = v_prime.slots[cut_slot]
    far = graph.twin(cut_dart)
    if far.vertex == v_prime.id:
        raise LoopEdge(f"edge {cut_dart // 2} at vertex {v_prime.id} is a loop")
    return RepairSite(
        defect=defect,
        direction=direction,
        side_dart=side_dart,
        v_prime=v_prime.id,
        cut_dart=cut_dart,
        cut_slot=cut_slot,
        v_second=far.vertex,
        far_slot=far.slot,
    )


@dataclass(frozen=True)
class RegionQ:
    """Quadrangular strip bounding a repair.

    ``s0`` holds the ids of the removed edges that left ``v`` through the
    defect slot. ``s0_prime`` starts with ``e'``, ``s1`` runs from ``v'``
    through ``e''`` to ``v_s`` and ``s1_prime`` leaves ``v_s`` towards the strip.
    """
    s0: Tuple[int, ...]
    s0_prime: Tuple[int, ...]
    s1: Tuple[int, ...]
    s1_prime: Tuple[int, ...]
    a: float
    b: float
    edge_a: float
    side_path: Optional[Tuple[int, ...]] = None  # mesh path of e' from v to v'
    top_path: Optional[Tuple[int, ...]] = None  # mesh path of e'' from v' to v''
    boundary: Tuple[Position, ...] = ()

    @property
    def area(self) -> float:
        return self.a * self.b

    @property
    def diagonal(self) -> float:
        return math.sqrt(self.a * self.a + self.b * self.b)

    @property
    def drift(self) -> float:
        return drift_value(self.a, self.b)

    @property
    def new_edge_length(self) -> float:
        return math.sqrt(self.edge_a * self.edge_a + self.b * self.b)


def _chain(graph: SeparatrixGraph, dart: int) -> Tuple[Tuple[int, ...], float, int, int]:
    """Edges, stored length and final arrival dart of the straight walk from ``dart``."""
    steps, _ = graph.straight_walk(dart)
    edges = tuple(s.edge for s in steps)
    return edges, sum(graph.edges[e].length for e in edges), steps[-1].arrival, len(steps)


def region_for_site(graph: SeparatrixGraph, site: RepairSite) -> RegionQ:
    s0_prime, _, _, _ = _chain(graph, site.side_dart)
    s1, a, last, _ = _chain(graph, site.cut_dart)
    s1_prime: Tuple[int, ...] = ()
    end = graph.darts[last]
    v_s = graph.vertices[end.vertex]
    if v_s.kind.is_singular:
        towards = graph.dart_at(v_s.id, end.slot - site.direction.step)
        if towards is not None:
            s1_prime, _, _, _ = _chain(graph, towards)

    side_polyline, side_path = graph.oriented_edge(site.side_dart)
    top_polyline, top_path = graph.oriented_edge(site.cut_dart)
    return RegionQ(
        s0=site.defect.removed,
        s0_prime=s0_prime,
        s1=s1,
        s1_prime=s1_prime,
        a=a,
        b=graph.edges[site.side_dart // 2].length,
        edge_a=graph.edges[site.cut_dart // 2].length,
        side_path=side_path,
        top_path=top_path,
        boundary=tuple(side_polyline) + tuple(top_polyline[1:]),
    )


def compute_region(graph: SeparatrixGraph, defect: Defect, direction: RepairDirection) -> RegionQ:
    """Strip measured on the current graph for repairing ``defect`` in ``direction``."""
    return region_for_site(graph, locate_repair(graph, defect, direction))


def digital_line(a: int, b: int) -> List[Tuple[int, int]]:
    """Digital straight segment from (0, 0) to (a, b), one point per step of the longer axis.

    Halves round towards the lower coordinate.
    """
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise NonPositiveDimension(f"digital line needs a non-degenerate extent, got ({a}, {b})")
    if a >= b:
        return [(x, (2 * x * b + a - 1) // (2 * a)) for x in range(a + 1)]
    return [((2 * y * a + b - 1) // (2 * b), y) for y in range(b + 1)]


def grid_staircase(mesh: Optional[QuadMesh], region: RegionQ) -> Tuple[int, ...]:
    """Mesh vertices of the digital diagonal across the rectangular sub-grid of a region.

    Rows follow e' from ``v`` to ``v'``; columns follow e'' from ``v'`` to ``v''``.
    """
    side, top = region.side_path, region.top_path
    if mesh is None:
        raise NotAGrid("graph has no mesh attached")
    if side is None or top is None:
        raise NotAGrid("strip side is a diagonal edge without a mesh path")
    height, width = len(side) - 1, len(top) - 1
    if side[-1] != top[0]:
        raise NotAGrid("strip sides do not meet at v'")
    grid = [[-1] * (width + 1) for _ in range(height + 1)]
    for q in range(height + 1):
        grid[q][0] = side[q]
    grid[height] = list(top)
    for q in range(height - 1, -1, -1):
        for p in range(1, width + 1):
            corner = mesh.quad_completing(grid[q][p - 1], grid[q + 1][p - 1], grid[q + 1][p])
            if corner is None:
                raise NotAGrid(f"no quad completes cell ({p}, {q}) of a {width}x{height} strip")
            grid[q][p] = corner
    return tuple(grid[q][p] for p, q in digital_line(width, height))


def embed_diagonal(graph: SeparatrixGraph, region: RegionQ, new_edge: int) -> Tuple[Position, ...]:
    """Store the staircase polyline, model length and provenance on a repair's new edge."""
    edge = graph.edges[new_edge]
    try:
        staircase = grid_staircase(graph.mesh, region)
        polyline = tuple(graph.mesh.positions[x] for x in staircase)
    except NotAGrid as e:
        logger.warning(f"Edge {new_edge} keeps its boundary polyline: {e}")
        polyline = region.boundary
    graph.update_edge(
        edge.id,
        length=region.new_edge_length,
        polyline=polyline,
        mesh_path=None,
        provenance=Provenance(
            kind=ProvenanceKind.NEW_DIAGONAL,
            a=region.edge_a,
            b=region.b,
            strip_a=region.a,
            drift=region.drift,
        ),
    )
    return polyline
