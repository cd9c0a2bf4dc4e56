from .crud_graph_document import (
    CRUDGraphDocument,
    canonical_json,
    canonical_line,
    crud_graph_document,
    load_graph,
    save_graph,
)
from .crud_quad_mesh import CRUDQuadMesh, crud_quad_mesh
