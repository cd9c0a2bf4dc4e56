"""
Deterministic SVG drawings of separatrix graphs
"""
import io
import logging
from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from ..config import get_settings  # noqa: E402
from ..models.separatrix_graph import ProvenanceKind, SeparatrixGraph  # noqa: E402

logger = logging.getLogger(__name__)

# isometric view: x and z recede at 30 degrees, y points up
AXONOMETRIC = np.array([
    [np.cos(np.pi / 6), 0.0, -np.cos(np.pi / 6)],
    [-np.sin(np.pi / 6), 1.0, -np.sin(np.pi / 6)],
])

EDGE_COLORS = {
    ProvenanceKind.SEPARATRIX: "#1f4e79",
    ProvenanceKind.NEW_DIAGONAL: "#c0392b",
}


def project(points: np.ndarray) -> np.ndarray:
    """Map (N, 3) positions to (N, 2) drawing coordinates."""
    return np.asarray(points, dtype=float).reshape(-1, 3) @ AXONOMETRIC.T


def render_svg(graph: SeparatrixGraph, title: Optional[str] = None) -> str:
    """Edges colored by provenance, singular vertices as circles, regular vertices as squares."""
    matplotlib.rcParams["svg.hashsalt"] = "sepgraph"
    size = get_settings().SVG_SIZE_INCHES
    fig, ax = plt.subplots(1, 1, figsize=(size, size))
    try:
        ax.set_aspect("equal")
        ax.set_axis_off()
        for kind, color in EDGE_COLORS.items():
            segments = [
                project(np.asarray(e.polyline, dtype=float))
                for _, e in sorted(graph.edges.items())
                if e.provenance.kind is kind and len(e.polyline) > 1
            ]
            if segments:
                ax.add_collection(LineCollection(segments, colors=color, linewidths=1.0, label=kind.value))

        vertices = [graph.vertices[v] for v in sorted(graph.vertices)]
        singular = [v.position for v in vertices if v.kind.is_singular]
        regular = [v.position for v in vertices if not v.kind.is_singular]
        if singular:
            xy = project(np.asarray(singular))
            ax.scatter(xy[:, 0], xy[:, 1], marker="o", s=30, c="#e67e22", zorder=3)
        if regular:
            xy = project(np.asarray(regular))
            ax.scatter(xy[:, 0], xy[:, 1], marker="s", s=12, c="#2c3e50", zorder=3)
        ax.autoscale_view()
        if title:
            ax.set_title(title)

        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return buffer.getvalue()


def save_svg(graph: SeparatrixGraph, path: Union[str, Path], title: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        stream.write(render_svg(graph, title))
    logger.debug(f"Wrote SVG drawing to {path}")
