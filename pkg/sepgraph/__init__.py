"""
Separatrix graphs of quad meshes and their topological simplification.
"""
from .__version__ import __version__
from .config import SepgraphSettings, get_settings
from .crud import crud_graph_document, crud_quad_mesh, load_graph, save_graph
from .models import (
    ALL_DELETE_CONFIGS,
    DefectKind,
    DeleteConfig,
    Endpoint,
    QuadMesh,
    RepairDirection,
    SeparatrixGraph,
    VertexKind,
    singularities,
)
from .schemas import EnergyConfig, StopCriteria
from .services.drift import compute_region, digital_line, drift_value, embed_diagonal
from .services.mesh_generators import generate_cube_grid, generate_dipole_grid, generate_torus_grid
from .services.operations import (
    apply_log,
    delete_separatrix,
    macro_operation,
    repair_defect,
    switch_separatrix,
    undo_records,
)
from .services.search import (
    choose_min_drift,
    energy_of,
    exhaustive_search,
    greedy_simplify,
    select_initial_separatrix,
)
from .services.tracing import (
    classify_transition,
    face_census,
    graph_stats,
    trace_separatrices,
    validate_graph,
)
