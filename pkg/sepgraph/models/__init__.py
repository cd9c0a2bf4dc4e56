from .quad_mesh import QuadMesh, singularities
from .separatrix_graph import (
    ALL_DELETE_CONFIGS,
    Dart,
    Defect,
    DefectKind,
    DeleteConfig,
    Endpoint,
    GraphEdge,
    GraphVertex,
    Provenance,
    ProvenanceKind,
    RepairDirection,
    Separatrix,
    SeparatrixGraph,
    Transition,
    VertexKind,
)
