"""
Pydantic schemas for graph validation reports, face censuses and statistics
"""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class ViolationKind(str, Enum):
    """Kinds of graph property violations."""
    FACE_DEGREE = "face_degree"
    VALENCE = "valence"
    VACANT_TWIN = "vacant_twin"
    RADIAL_SLOT = "radial_slot"
    SEPARATRIX_CHAIN = "separatrix_chain"
    UNCOVERED_EDGE = "uncovered_edge"
    EDGE_LENGTH = "edge_length"
    EMBEDDING = "embedding"
    DEFECT = "defect"


class Violation(BaseModel):
    kind: ViolationKind
    detail: str
    vertex: Optional[int] = None
    edge: Optional[int] = None


class ValidationReport(BaseModel):
    """Violations of the quadrangular-partition properties; empty means valid."""
    violations: List[Violation] = Field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def count(self, kind: ViolationKind) -> int:
        return sum(1 for v in self.violations if v.kind == kind)


class FaceCensus(BaseModel):
    degrees: Dict[int, int] = Field(default_factory=dict)
    face_count: int = 0
    euler_characteristic: int = 0


class GraphStats(BaseModel):
    """Summary counts of a separatrix graph."""
    singularities: int
    separatrices: int
    regular_vertices: int
    edges: int
    total_edge_length: float
    euler_characteristic: Optional[int] = None
    diagonal_edges: int = 0
    total_drift: float = 0.0
    defects: int = 0
