"""
Error types and exit-code classification for mesh ingestion, graph
extraction and simplification.
"""
import logging
from enum import Enum, IntEnum
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class SepgraphError(Exception):
    """Base class for every error raised by sepgraph."""


# Mesh errors

class MeshError(SepgraphError):
    """Invalid or unsupported quad mesh."""


class ParseError(MeshError):
    """Malformed OBJ record."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class NonQuadFace(MeshError):
    """Face without exactly four distinct vertices."""


class BoundaryEdge(MeshError):
    """Edge incident to a single face."""


class NonManifold(MeshError):
    """Edge with more than two faces, inconsistent winding, or a split vertex fan."""


class ValenceOutOfRange(MeshError):
    """Vertex valence outside {3, 4, 5}."""


class TooSmall(MeshError):
    """Generator dimensions too small for a valid mesh."""


# Graph errors

class GraphError(SepgraphError):
    """Invalid use of a separatrix graph."""


class ClosedStreamline(GraphError):
    """A straight walk closed on itself without meeting a singularity."""

    def __init__(self, message: str, cycle: Optional[List[int]] = None):
        self.cycle = cycle or []
        super().__init__(message)


class NotRegular(GraphError):
    pass


class NotIncident(GraphError):
    pass


class SameEdge(GraphError):
    pass


class DefectsPresent(GraphError):
    """Operation requires a defect-free graph."""


class InvariantViolation(GraphError):
    """An internal invariant of the rewrite engine failed."""


# Operation errors

class RepairBlocked(SepgraphError):
    """The requested repair option cannot be used."""


class NeighborSingular(RepairBlocked):
    """The neighbour v' reached through e' is singular."""


class NeighborDefective(RepairBlocked):
    """The neighbour v' reached through e' carries a vacant slot."""


class LoopEdge(RepairBlocked):
    """The edge e'' to be cut is a loop at v'."""


class DanglingBlocked(RepairBlocked):
    """The dangling branch cannot be deleted."""


class RepairImpossible(SepgraphError):
    """The chosen delete configuration cannot repair its S-defect."""


class Stuck(SepgraphError):
    """No repair option is left for the current defect."""

    def __init__(self, message: str, log: Optional[List[Any]] = None):
        self.log = log or []
        super().__init__(message)


# Drift errors

class NonPositiveDimension(SepgraphError):
    pass


class NotAGrid(SepgraphError):
    """A repair region does not map to a rectangular mesh sub-grid."""


# Search errors

class NoRegularVertices(SepgraphError):
    pass


class BudgetExceeded(SepgraphError):
    """The exhaustive search visited more nodes than allowed."""

    def __init__(self, message: str, nodes_visited: int = 0, partial: Any = None):
        self.nodes_visited = nodes_visited
        self.partial = partial
        super().__init__(message)


class NoSolution(SepgraphError):
    """No leaf of the solution forest terminates."""


class ConfigConflict(SepgraphError):
    """Inconsistent command-line or JSON configuration."""


class ErrorType(Enum):
    """Types of errors surfaced to the command line."""
    USAGE_ERROR = "usage_error"
    PARSE_ERROR = "parse_error"
    NON_QUAD_FACE = "non_quad_face"
    BOUNDARY_EDGE = "boundary_edge"
    NON_MANIFOLD = "non_manifold"
    VALENCE_OUT_OF_RANGE = "valence_out_of_range"
    TOO_SMALL = "too_small"
    CLOSED_STREAMLINE = "closed_streamline"
    BUDGET_EXCEEDED = "budget_exceeded"
    NO_SOLUTION = "no_solution"
    UNKNOWN_ERROR = "unknown_error"


class ExitCode(IntEnum):
    """Stable process exit codes."""
    OK = 0
    UNEXPECTED = 1
    USAGE = 2
    PARSE_ERROR = 10
    NON_QUAD_FACE = 11
    BOUNDARY_EDGE = 12
    NON_MANIFOLD = 13
    VALENCE_OUT_OF_RANGE = 14
    TOO_SMALL = 15
    CLOSED_STREAMLINE = 20
    BUDGET_EXCEEDED = 30
    NO_SOLUTION = 31


class ErrorClassifier:
    """Classifies errors and determines the exit code reported for them."""

    ERROR_TYPES = [
        (ConfigConflict, ErrorType.USAGE_ERROR),
        (ParseError, ErrorType.PARSE_ERROR),
        (NonQuadFace, ErrorType.NON_QUAD_FACE),
        (BoundaryEdge, ErrorType.BOUNDARY_EDGE),
        (NonManifold, ErrorType.NON_MANIFOLD),
        (ValenceOutOfRange, ErrorType.VALENCE_OUT_OF_RANGE),
        (TooSmall, ErrorType.TOO_SMALL),
        (ClosedStreamline, ErrorType.CLOSED_STREAMLINE),
        (BudgetExceeded, ErrorType.BUDGET_EXCEEDED),
        (NoSolution, ErrorType.NO_SOLUTION),
    ]

    EXIT_CODES: Dict[ErrorType, ExitCode] = {
        ErrorType.USAGE_ERROR: ExitCode.USAGE,
        ErrorType.PARSE_ERROR: ExitCode.PARSE_ERROR,
        ErrorType.NON_QUAD_FACE: ExitCode.NON_QUAD_FACE,
        ErrorType.BOUNDARY_EDGE: ExitCode.BOUNDARY_EDGE,
        ErrorType.NON_MANIFOLD: ExitCode.NON_MANIFOLD,
        ErrorType.VALENCE_OUT_OF_RANGE: ExitCode.VALENCE_OUT_OF_RANGE,
        ErrorType.TOO_SMALL: ExitCode.TOO_SMALL,
        ErrorType.CLOSED_STREAMLINE: ExitCode.CLOSED_STREAMLINE,
        ErrorType.BUDGET_EXCEEDED: ExitCode.BUDGET_EXCEEDED,
        ErrorType.NO_SOLUTION: ExitCode.NO_SOLUTION,
        ErrorType.UNKNOWN_ERROR: ExitCode.UNEXPECTED,
    }

    @classmethod
    def classify_error(cls, error: BaseException) -> ErrorType:
        """Classify an error to determine its type."""
        for error_class, error_type in cls.ERROR_TYPES:
            if isinstance(error, error_class):
                return error_type
        return ErrorType.UNKNOWN_ERROR

    @classmethod
    def get_exit_code(cls, error: BaseException) -> ExitCode:
        """Get the process exit code for the given error."""
        return cls.EXIT_CODES[cls.classify_error(error)]


class ErrorHandler:
    """Logs classified errors and turns them into exit codes."""

    def handle(self, error: BaseException, context: str = "sepgraph") -> ExitCode:
        """Log an error and return the exit code for it."""
        error_type = ErrorClassifier.classify_error(error)

        if error_type == ErrorType.UNKNOWN_ERROR:
            logger.error(f"Unexpected failure in {context}: {error}", exc_info=True)
        else:
            logger.error(f"{context} failed: {error_type.value} - {error}")
        return ErrorClassifier.get_exit_code(error)


# Global error handler instance
error_handler = ErrorHandler()
