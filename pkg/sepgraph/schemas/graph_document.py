"""
Pydantic schemas for the canonical JSON export of a separatrix graph
"""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from ..models.separatrix_graph import DefectKind, ProvenanceKind, VertexKind
from .run_manifest import RunManifest

GRAPH_SCHEMA_VERSION = "1"


class VertexRecord(BaseModel):
    id: int
    kind: VertexKind
    mesh_vertex: Optional[int] = None
    position: List[float]
    slots: List[Optional[int]]


class DartRecord(BaseModel):
    id: int
    vertex: int
    slot: int
    twin: int


class ProvenanceRecord(BaseModel):
    kind: ProvenanceKind
    separatrix: Optional[int] = None
    a: Optional[float] = None
    b: Optional[float] = None
    strip_a: Optional[float] = None
    drift: Optional[float] = None


class EdgeRecord(BaseModel):
    id: int
    darts: List[int]
    length: float
    polyline: List[List[float]]
    mesh_path: Optional[List[int]] = None
    provenance: ProvenanceRecord


class SeparatrixRecord(BaseModel):
    id: int
    edges: List[int]
    start: List[int]
    end: List[int]
    complete: bool = True


class DefectRecord(BaseModel):
    vertex: int
    slot: int
    kind: DefectKind
    removed: List[int] = Field(default_factory=list)


class GraphDocument(BaseModel):
    """Canonical graph export; lists are sorted by id."""
    schema_version: str = GRAPH_SCHEMA_VERSION
    manifest: Optional[RunManifest] = None
    counters: Dict[str, int] = Field(default_factory=dict)
    vertices: List[VertexRecord] = Field(default_factory=list)
    darts: List[DartRecord] = Field(default_factory=list)
    edges: List[EdgeRecord] = Field(default_factory=list)
    separatrices: List[SeparatrixRecord] = Field(default_factory=list)
    defects: List[DefectRecord] = Field(default_factory=list)
