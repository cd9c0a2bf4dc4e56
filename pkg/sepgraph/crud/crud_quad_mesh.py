"""
Reading and writing quad meshes as Wavefront OBJ
"""
import logging
from pathlib import Path
from typing import IO, List, Set, Union

from ..models.quad_mesh import QuadMesh
from ..services.error_handler import ParseError

logger = logging.getLogger(__name__)

IGNORED_RECORDS = {"o", "g", "s", "usemtl", "mtllib"}
UNUSED_ATTRIBUTES = {"vt", "vn", "vp"}


class CRUDQuadMesh:
    """OBJ persistence for QuadMesh; only ``v`` and ``f`` records carry data."""

    def __init__(self, float_format: str = ".10g"):
        self.float_format = float_format

    def _parse_index(self, token: str, vertex_count: int, line_number: int) -> int:
        head = token.split("/")[0]
        try:
            index = int(head)
        except ValueError:
            raise ParseError(f"bad face index {token!r}", line_number=line_number)
        if index > 0:
            return index - 1
        if index < 0:
            return vertex_count + index
        raise ParseError("face index 0 is not valid in OBJ", line_number=line_number)

    def read(self, stream: IO[str]) -> QuadMesh:
        positions: List[List[float]] = []
        faces: List[List[int]] = []
        face_lines: List[int] = []
        warned: Set[str] = set()
        for line_number, raw in enumerate(stream, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            record, *values = line.split()
            if record == "v":
                if len(values) < 3:
                    raise ParseError(f"vertex has {len(values)} coordinates", line_number=line_number)
                try:
                    positions.append([float(x) for x in values[:3]])
                except ValueError:
                    raise ParseError(f"bad vertex coordinates {values[:3]}", line_number=line_number)
            elif record == "f":
                faces.append([self._parse_index(t, len(positions), line_number) for t in values])
                face_lines.append(line_number)
            elif record in UNUSED_ATTRIBUTES:
                if record not in warned:
                    logger.warning(f"Ignoring OBJ '{record}' records (first at line {line_number})")
                    warned.add(record)
            elif record not in IGNORED_RECORDS:
                raise ParseError(f"unsupported OBJ record {record!r}", line_number=line_number)
        for face, line_number in zip(faces, face_lines):
            missing = [v + 1 for v in face if not 0 <= v < len(positions)]
            if missing:
                raise ParseError(f"face references missing vertex {missing[0]}", line_number=line_number)
        logger.debug(f"Read OBJ with {len(positions)} vertices and {len(faces)} faces")
        return QuadMesh.from_faces(positions, faces)

    def load(self, path: Union[str, Path]) -> QuadMesh:
        try:
            with open(path, "r", encoding="utf-8") as stream:
                return self.read(stream)
        except UnicodeDecodeError as e:
            raise ParseError(f"{path} is not UTF-8 text: {e.reason} at byte {e.start}") from e

    def write(self, mesh: QuadMesh, stream: IO[str]) -> None:
        fmt = self.float_format
        for x, y, z in mesh.positions:
            stream.write(f"v {x:{fmt}} {y:{fmt}} {z:{fmt}}\n")
        for face in mesh.faces:
            stream.write("f " + " ".join(str(v + 1) for v in face) + "\n")

    def save(self, mesh: QuadMesh, path: Union[str, Path]) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as stream:
            self.write(mesh, stream)


crud_quad_mesh = CRUDQuadMesh()
