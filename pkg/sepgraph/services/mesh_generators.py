"""
Synthetic quad meshes used as test instances: torus grids, subdivided cubes
and torus grids carrying dislocation pairs of singularities.
"""
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..models.quad_mesh import QuadMesh
from .error_handler import TooSmall

logger = logging.getLogger(__name__)

MAJOR_RADIUS = 2.0
MINOR_RADIUS = 1.0


def _torus_positions(rows: int, cols: int) -> np.ndarray:
    """Standard torus embedding; row index sweeps the tube, column the ring."""
    i, j = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    u = 2.0 * math.pi * j / cols
    v = 2.0 * math.pi * i / rows
    x = (MAJOR_RADIUS + MINOR_RADIUS * np.cos(v)) * np.cos(u)
    y = (MAJOR_RADIUS + MINOR_RADIUS * np.cos(v)) * np.sin(u)
    z = MINOR_RADIUS * np.sin(v)
    return np.stack([x, y, z], axis=-1).reshape(-1, 3)


def _torus_faces(rows: int, cols: int) -> List[Tuple[int, int, int, int]]:
    def vid(i: int, j: int) -> int:
        return (i % rows) * cols + (j % cols)

    return [
        (vid(i, j), vid(i, j + 1), vid(i + 1, j + 1), vid(i + 1, j))
        for i in range(rows)
        for j in range(cols)
    ]


def generate_torus_grid(rows: int, cols: int) -> QuadMesh:
    """Genus-1 grid with rows*cols vertices, all of valence 4."""
    if rows < 3 or cols < 3:
        raise TooSmall(f"torus grid needs rows, cols >= 3 (got {rows}x{cols})")
    return QuadMesh.from_faces(_torus_positions(rows, cols).tolist(), _torus_faces(rows, cols))


def generate_cube_grid(n: int) -> QuadMesh:
    """Cube surface with every face subdivided n x n."""
    if n < 1:
        raise TooSmall(f"cube grid needs n >= 1 (got {n})")

    points = sorted(
        (x, y, z)
        for x in range(n + 1)
        for y in range(n + 1)
        for z in range(n + 1)
        if 0 in (x, y, z) or n in (x, y, z)
    )
    index: Dict[Tuple[int, int, int], int] = {p: i for i, p in enumerate(points)}

    faces: List[Tuple[int, int, int, int]] = []
    for axis in range(3):
        a_axis, b_axis = (axis + 1) % 3, (axis + 2) % 3
        for level in (0, n):
            for a in range(n):
                for b in range(n):
                    corners = []
                    for da, db in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        p = [0, 0, 0]
                        p[axis] = level
                        p[a_axis] = a + da
                        p[b_axis] = b + db
                        corners.append(index[tuple(p)])
                    # e_a x e_b = e_axis, so this order faces +axis
                    if level == 0:
                        corners.reverse()
                    faces.append(tuple(corners))

    positions = np.asarray(points, dtype=float) / n - 0.5
    return QuadMesh.from_faces(positions.tolist(), faces)


def default_dipole_sites(rows: int, cols: int) -> List[Tuple[int, int]]:
    """Two anchors in disjoint column bands so their separatrices cross."""
    return [(1, 0), (rows // 2 + 1, cols // 2)]


def generate_dipole_grid(
    rows: int,
    cols: int,
    sites: Optional[Sequence[Tuple[int, int]]] = None,
) -> QuadMesh:
    """Torus grid with one dislocation pair per site.

    At anchor (i, j) the two quads sharing the edge a=(i, j), b=(i, j+1) are
    replaced by three quads around a new vertex m placed at the edge midpoint.
    a and m end with valence 3; the vertices above and below a end with
    valence 5. A single 3-5 pair cannot exist on a closed quadrangulated torus,
    so every surgery yields two of each.
    """
    if rows < 5 or cols < 5:
        raise TooSmall(f"dipole grid needs rows, cols >= 5 (got {rows}x{cols})")
    anchors = list(sites) if sites is not None else default_dipole_sites(rows, cols)
    _check_sites(anchors, rows, cols)

    positions = _torus_positions(rows, cols).tolist()
    faces = _torus_faces(rows, cols)

    def vid(i: int, j: int) -> int:
        return (i % rows) * cols + (j % cols)

    removed = set()
    added: List[Tuple[int, int, int, int]] = []
    for i, j in anchors:
        a, b = vid(i, j), vid(i, j + 1)
        c, d = vid(i + 1, j + 1), vid(i + 1, j)
        e, f = vid(i - 1, j), vid(i - 1, j + 1)
        m = len(positions)
        positions.append(((np.asarray(positions[a]) + np.asarray(positions[b])) / 2.0).tolist())
        removed.add((i % rows) * cols + (j % cols))  # face (a, b, c, d)
        removed.add(((i - 1) % rows) * cols + (j % cols))  # face (e, f, b, a)
        added.extend([(a, e, m, d), (e, f, b, m), (b, c, d, m)])
        logger.debug(f"Dislocation surgery at ({i}, {j}) adds vertex {m}")

    kept = [face for index, face in enumerate(faces) if index not in removed]
    return QuadMesh.from_faces(positions, kept + added)


def _check_sites(anchors: Iterable[Tuple[int, int]], rows: int, cols: int) -> None:
    used_columns = set()
    for i, j in anchors:
        band = {j % cols, (j + 1) % cols}
        if band & used_columns:
            raise TooSmall(f"dipole site ({i}, {j}) overlaps another site's column band")
        used_columns |= band
