"""
Pydantic schemas for operation logs, per-step statistics and oracle reports
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field

from ..models.separatrix_graph import DefectKind, Endpoint, RepairDirection
from .run_manifest import RunManifest


class OperationType(str, Enum):
    DELETE = "delete"
    SWITCH = "switch"


class OperationOutcome(str, Enum):
    """State left behind by an atomic operation."""
    PENDING = "pending"  # one S-defect and one R-defect remain
    TERMINATED = "terminated"  # no defects remain


class DefectRef(BaseModel):
    vertex: int
    slot: int
    kind: DefectKind


class OperationLogEntry(BaseModel):
    """One applied atomic operation; replayable from the graph it was applied to."""
    op: OperationType
    macro: int = 0
    separatrix: Optional[int] = None
    endpoint: Optional[Endpoint] = None
    direction: RepairDirection
    defect: Optional[DefectRef] = None
    cut_edge: Optional[int] = None
    new_edge: Optional[int] = None
    removed_vertices: int = 0
    drift: Optional[float] = None
    outcome: OperationOutcome = OperationOutcome.PENDING
    notes: List[str] = Field(default_factory=list)


class StepStats(BaseModel):
    """Graph state after one accepted macro-operation."""
    step: int
    separatrix: Optional[int] = None
    regular_vertices: int
    energy: float
    total_drift: float
    switches: int = 0
    reduction_percent: float = 0.0


class StopReason(str, Enum):
    TARGET_REACHED = "target_reached"
    MAX_DRIFT = "max_drift"
    MAX_MACRO_OPS = "max_macro_ops"
    NO_REGULAR_VERTICES = "no_regular_vertices"
    NO_PROGRESS = "no_progress"


class OracleStatus(str, Enum):
    SOLVED = "solved"
    NO_SOLUTION = "no_solution"
    BUDGET_EXCEEDED = "budget_exceeded"


class OracleReport(BaseModel):
    """Exhaustive single macro-operation optimum compared with the greedy result."""
    manifest: Optional[RunManifest] = None
    status: OracleStatus
    nodes_visited: int
    node_budget: int
    input_energy: float
    oracle_energy: Optional[float] = None
    greedy_energy: float
    energy_gap: Optional[float] = None
    oracle_log: List[OperationLogEntry] = Field(default_factory=list)
    greedy_log: List[OperationLogEntry] = Field(default_factory=list)
