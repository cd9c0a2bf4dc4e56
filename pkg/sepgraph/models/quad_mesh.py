from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..services.error_handler import (
    BoundaryEdge,
    NonManifold,
    NonQuadFace,
    ValenceOutOfRange,
)

Position = Tuple[float, float, float]
Face = Tuple[int, int, int, int]

ALLOWED_VALENCES = (3, 4, 5)


def _edge_key(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class QuadMesh:
    """Closed all-quad manifold mesh acting as a discrete cross field.

    Vertex ids are the 0-based indices into ``positions``; faces list their
    corners in a consistent winding. ``rings`` holds, per vertex, the
    neighbours in counter-clockwise radial order, starting at the smallest
    neighbour id. Build instances with :meth:`from_faces`, which validates.
    """

    positions: Tuple[Position, ...]
    faces: Tuple[Face, ...]
    rings: Tuple[Tuple[int, ...], ...] = field(repr=False)
    edge_faces: Dict[Tuple[int, int], Tuple[int, int]] = field(repr=False, compare=False)

    @classmethod
    def from_faces(
        cls,
        positions: Sequence[Sequence[float]],
        faces: Sequence[Sequence[int]],
    ) -> "QuadMesh":
        """Validate connectivity and derive radial orders."""
        vertex_count = len(positions)
        checked_faces: List[Face] = []
        for index, face in enumerate(faces):
            if len(face) != 4:
                raise NonQuadFace(f"face {index} has {len(face)} vertices")
            if len(set(face)) != 4:
                raise NonQuadFace(f"face {index} repeats a vertex: {tuple(face)}")
            for v in face:
                if not 0 <= v < vertex_count:
                    raise NonQuadFace(f"face {index} references missing vertex {v}")
            checked_faces.append(tuple(int(v) for v in face))

        directed: Dict[Tuple[int, int], int] = {}
        undirected: Dict[Tuple[int, int], List[int]] = {}
        # next_ccw[v][n] = neighbour met after n when turning counter-clockwise inside a face
        next_ccw: List[Dict[int, int]] = [dict() for _ in range(vertex_count)]
        for f, face in enumerate(checked_faces):
            for i in range(4):
                u, w = face[i], face[(i + 1) % 4]
                if (u, w) in directed:
                    raise NonManifold(
                        f"directed edge ({u}, {w}) used by faces {directed[(u, w)]} and {f}"
                    )
                directed[(u, w)] = f
                undirected.setdefault(_edge_key(u, w), []).append(f)
                prev = face[(i - 1) % 4]
                if w in next_ccw[u]:
                    raise NonManifold(f"vertex {u} has a non-manifold fan")
                next_ccw[u][w] = prev

        edge_faces: Dict[Tuple[int, int], Tuple[int, int]] = {}
        for key in sorted(undirected):
            incident = undirected[key]
            if len(incident) == 1:
                raise BoundaryEdge(f"edge {key} has a single face {incident[0]}")
            if len(incident) > 2:
                raise NonManifold(f"edge {key} has {len(incident)} faces")
            edge_faces[key] = (incident[0], incident[1])

        rings: List[Tuple[int, ...]] = []
        for v in range(vertex_count):
            fan = next_ccw[v]
            if not fan:
                raise ValenceOutOfRange(f"vertex {v} is isolated (valence 0)")
            start = min(fan)
            ring = [start]
            current = fan[start]
            while current != start:
                if current not in fan or len(ring) > len(fan):
                    raise NonManifold(f"vertex {v} has an open fan")
                ring.append(current)
                current = fan[current]
            if len(ring) != len(fan):
                raise NonManifold(f"vertex {v} has a disconnected fan")
            if len(ring) not in ALLOWED_VALENCES:
                raise ValenceOutOfRange(f"vertex {v} has valence {len(ring)}")
            rings.append(tuple(ring))

        return cls(
            positions=tuple(tuple(float(c) for c in p) for p in positions),
            faces=tuple(checked_faces),
            rings=tuple(rings),
            edge_faces=edge_faces,
        )

    @property
    def vertex_count(self) -> int:
        return len(self.positions)

    @property
    def edge_count(self) -> int:
        return len(self.edge_faces)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + self.face_count

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    def valence(self, v: int) -> int:
        return len(self.rings[v])

    def valence_histogram(self) -> Dict[int, int]:
        return dict(sorted(Counter(len(ring) for ring in self.rings).items()))

    def slot_of(self, v: int, neighbor: int) -> int:
        """Radial slot of the mesh edge (v, neighbor) around v."""
        return self.rings[v].index(neighbor)

    def straight_next(self, came_from: int, v: int) -> Optional[int]:
        """Vertex reached by crossing straight through a valence-4 vertex."""
        ring = self.rings[v]
        if len(ring) != 4:
            return None
        return ring[(ring.index(came_from) + 2) % 4]

    def quad_completing(self, a: int, b: int, c: int) -> Optional[int]:
        """Fourth corner of the face holding the corner path a-b-c, if any."""
        for f in self.edge_faces.get(_edge_key(a, b), ()):
            face = self.faces[f]
            if c in face:
                rest = [v for v in face if v not in (a, b, c)]
                if len(rest) == 1:
                    return rest[0]
        return None


def singularities(mesh: QuadMesh) -> List[Tuple[int, Fraction]]:
    """Irregular vertices with their field index: +1/4 at valence 3, -1/4 at valence 5."""
    found = []
    for v, ring in enumerate(mesh.rings):
        if len(ring) != 4:
            found.append((v, Fraction(4 - len(ring), 4)))
    return found
