"""
Canonical JSON persistence for separatrix graphs
"""
import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import BaseModel, ValidationError

from ..config import get_settings
from ..models.quad_mesh import QuadMesh
from ..models.separatrix_graph import (
    Dart,
    Defect,
    GraphEdge,
    GraphVertex,
    Provenance,
    SeparatrixGraph,
)
from ..schemas.graph_document import (
    DartRecord,
    DefectRecord,
    EdgeRecord,
    GraphDocument,
    ProvenanceRecord,
    SeparatrixRecord,
    VertexRecord,
)
from ..schemas.run_manifest import RunManifest
from ..services.error_handler import ParseError

logger = logging.getLogger(__name__)


def _round_floats(value: Any, digits: int) -> Any:
    if isinstance(value, float):
        rounded = round(value, digits)
        return 0.0 if rounded == 0 else rounded
    if isinstance(value, dict):
        return {k: _round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, list):
        return [_round_floats(v, digits) for v in value]
    return value


def canonical_json(model: BaseModel) -> str:
    """Sorted keys, two-space indent and floats rounded to JSON_FLOAT_DIGITS."""
    payload = _round_floats(model.model_dump(mode="json"), get_settings().JSON_FLOAT_DIGITS)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def canonical_line(model: BaseModel) -> str:
    """Single-line canonical form used for JSON lines files."""
    payload = _round_floats(model.model_dump(mode="json"), get_settings().JSON_FLOAT_DIGITS)
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


class CRUDGraphDocument:
    """Convert graphs to and from ``GraphDocument`` and store them on disk."""

    def to_document(self, graph: SeparatrixGraph, manifest: Optional[RunManifest] = None) -> GraphDocument:
        vertices = [
            VertexRecord(
                id=v.id,
                kind=v.kind,
                mesh_vertex=v.mesh_vertex,
                position=list(v.position),
                slots=list(v.slots),
            )
            for v in (graph.vertices[k] for k in sorted(graph.vertices))
        ]
        darts = [
            DartRecord(id=d.id, vertex=d.vertex, slot=d.slot, twin=d.twin)
            for d in (graph.darts[k] for k in sorted(graph.darts))
        ]
        edges = [
            EdgeRecord(
                id=e.id,
                darts=list(e.darts),
                length=e.length,
                polyline=[list(p) for p in e.polyline],
                mesh_path=list(e.mesh_path) if e.mesh_path is not None else None,
                provenance=ProvenanceRecord(
                    kind=e.provenance.kind,
                    separatrix=e.provenance.separatrix,
                    a=e.provenance.a,
                    b=e.provenance.b,
                    strip_a=e.provenance.strip_a,
                    drift=e.provenance.drift,
                ),
            )
            for e in (graph.edges[k] for k in sorted(graph.edges))
        ]
        separatrices = [
            SeparatrixRecord(
                id=s.id,
                edges=list(s.edges),
                start=list(s.start),
                end=list(s.end),
                complete=s.complete,
            )
            for s in graph.separatrices.values()
        ]
        defects = [
            DefectRecord(vertex=d.vertex, slot=d.slot, kind=d.kind, removed=list(d.removed))
            for d in graph.defect_list()
        ]
        return GraphDocument(
            manifest=manifest,
            counters=dict(sorted(graph.counters.items())),
            vertices=vertices,
            darts=darts,
            edges=edges,
            separatrices=separatrices,
            defects=defects,
        )

    def from_document(self, document: GraphDocument, mesh: Optional[QuadMesh] = None) -> SeparatrixGraph:
        graph = SeparatrixGraph(mesh)
        for record in document.vertices:
            graph.vertices[record.id] = GraphVertex(
                id=record.id,
                kind=record.kind,
                mesh_vertex=record.mesh_vertex,
                position=tuple(record.position),
                slots=tuple(record.slots),
            )
            for slot, did in enumerate(record.slots):
                if did is not None:
                    graph.darts[did] = Dart(id=did, vertex=record.id, slot=slot)
        for record in document.edges:
            p = record.provenance
            graph.edges[record.id] = GraphEdge(
                id=record.id,
                length=record.length,
                polyline=tuple(tuple(point) for point in record.polyline),
                mesh_path=tuple(record.mesh_path) if record.mesh_path is not None else None,
                provenance=Provenance(
                    kind=p.kind, separatrix=p.separatrix, a=p.a, b=p.b, strip_a=p.strip_a, drift=p.drift,
                ),
            )
        for record in document.defects:
            graph.defects[(record.vertex, record.slot)] = Defect(
                vertex=record.vertex, slot=record.slot, kind=record.kind, removed=tuple(record.removed),
            )
        graph.counters = {
            "vertex": document.counters.get("vertex", max(graph.vertices, default=-1) + 1),
            "edge": document.counters.get("edge", max(graph.edges, default=-1) + 1),
        }
        return graph

    def dumps(self, graph: SeparatrixGraph, manifest: Optional[RunManifest] = None) -> str:
        return canonical_json(self.to_document(graph, manifest))

    def loads(self, text: str, mesh: Optional[QuadMesh] = None) -> SeparatrixGraph:
        try:
            document = GraphDocument.model_validate_json(text)
        except ValidationError as e:
            raise ParseError(f"invalid graph document: {e.error_count()} validation errors") from e
        return self.from_document(document, mesh)

    def save(self, graph: SeparatrixGraph, path: Union[str, Path], manifest: Optional[RunManifest] = None) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as stream:
            stream.write(self.dumps(graph, manifest))
        logger.debug(f"Saved graph with {len(graph.vertices)} vertices to {path}")

    def load(self, path: Union[str, Path], mesh: Optional[QuadMesh] = None) -> SeparatrixGraph:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"{path} is not UTF-8 text: {e.reason} at byte {e.start}") from e
        return self.loads(text, mesh)


crud_graph_document = CRUDGraphDocument()


def save_graph(graph: SeparatrixGraph, path: Union[str, Path], manifest: Optional[RunManifest] = None) -> None:
    crud_graph_document.save(graph, path, manifest)


def load_graph(path: Union[str, Path], mesh: Optional[QuadMesh] = None) -> SeparatrixGraph:
    return crud_graph_document.load(path, mesh)
