from .graph_document import (
    DartRecord,
    DefectRecord,
    EdgeRecord,
    GraphDocument,
    ProvenanceRecord,
    SeparatrixRecord,
    VertexRecord,
)
from .graph_report import (
    FaceCensus,
    GraphStats,
    ValidationReport,
    Violation,
    ViolationKind,
)
from .operation_log import (
    DefectRef,
    OperationLogEntry,
    OperationOutcome,
    OperationType,
    OracleReport,
    OracleStatus,
    StepStats,
    StopReason,
)
from .run_manifest import RunManifest
from .search_config import EnergyConfig, StopCriteria
