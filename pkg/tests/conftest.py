from typing import Dict, List, Tuple

import pytest

from sepgraph.config import get_settings
from sepgraph.crud.crud_graph_document import crud_graph_document
from sepgraph.models.quad_mesh import QuadMesh
from sepgraph.models.separatrix_graph import SeparatrixGraph
from sepgraph.services.mesh_generators import generate_cube_grid, generate_dipole_grid
from sepgraph.services.tracing import trace_separatrices

# three dislocation pairs where the top-ranked separatrix has no terminated
# macro-operation and greedy has to backtrack into another root
BACKTRACK_DIPOLE = (7, 6, [(1, 0), (2, 2), (1, 4)])


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def dipole_mesh() -> QuadMesh:
    return generate_dipole_grid(6, 6)


@pytest.fixture
def dipole_graph(dipole_mesh) -> SeparatrixGraph:
    return trace_separatrices(dipole_mesh)


@pytest.fixture
def cube1_graph() -> SeparatrixGraph:
    return trace_separatrices(generate_cube_grid(1))


@pytest.fixture
def backtrack_graph() -> SeparatrixGraph:
    rows, cols, sites = BACKTRACK_DIPOLE
    return trace_separatrices(generate_dipole_grid(rows, cols, sites))


def dump(graph: SeparatrixGraph) -> str:
    """Canonical JSON of a graph, used for exact state comparisons."""
    return crud_graph_document.dumps(graph)


def brute_force_walks(mesh: QuadMesh) -> Dict[Tuple[int, ...], int]:
    """Every separatrix as a canonical mesh path, counted once per traversal direction."""
    found: Dict[Tuple[int, ...], int] = {}
    for start in range(mesh.vertex_count):
        neighbours = mesh.rings[start]
        if len(neighbours) == 4:
            continue
        for first in neighbours:
            path: List[int] = [start, first]
            while len(mesh.rings[path[-1]]) == 4:
                ring = mesh.rings[path[-1]]
                path.append(ring[(ring.index(path[-2]) + 2) % 4])
            key = min(tuple(path), tuple(reversed(path)))
            found[key] = found.get(key, 0) + 1
    return found
