"""
Greedy simplification with backtracking, and the exhaustive single-step oracle.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, List, Optional, Set, Tuple

from ..config import get_settings
from ..models.separatrix_graph import (
    ALL_DELETE_CONFIGS,
    Defect,
    DefectKind,
    DeleteConfig,
    ProvenanceKind,
    RepairDirection,
    SeparatrixGraph,
)
from ..schemas.operation_log import (
    OperationLogEntry,
    OperationOutcome,
    OracleReport,
    OracleStatus,
    StepStats,
    StopReason,
)
from ..schemas.search_config import EnergyConfig, StopCriteria
from .drift import compute_region
from .error_handler import (
    BudgetExceeded,
    DefectsPresent,
    NoRegularVertices,
    RepairBlocked,
    RepairImpossible,
    Stuck,
)
from .operations import (
    OperationRecord,
    apply_log,
    delete_separatrix,
    switch_separatrix,
    undo_record,
    undo_records,
)

logger = logging.getLogger(__name__)

DIRECTIONS = (RepairDirection.CCW, RepairDirection.CW)


def total_drift(graph: SeparatrixGraph) -> float:
    return sum(
        e.provenance.drift or 0.0
        for e in graph.edges.values()
        if e.provenance.kind is ProvenanceKind.NEW_DIAGONAL
    )


def max_edge_drift(graph: SeparatrixGraph) -> float:
    return max(
        (
            e.provenance.drift or 0.0
            for e in graph.edges.values()
            if e.provenance.kind is ProvenanceKind.NEW_DIAGONAL
        ),
        default=0.0,
    )


def energy_of(graph: SeparatrixGraph, config: EnergyConfig) -> float:
    """lambda_R * |R| + lambda_W * total drift of the diagonal edges."""
    if graph.defects:
        raise DefectsPresent(f"energy is undefined with {len(graph.defects)} defects")
    return config.lambda_r * graph.regular_count + config.lambda_w * total_drift(graph)


def rank_separatrices(graph: SeparatrixGraph) -> List[int]:
    """Separatrix ids by decreasing number of regular vertices crossed, then by id."""
    registry = graph.separatrices
    return sorted(registry, key=lambda sid: (-len(set(registry[sid].interior)), sid))


def select_initial_separatrix(graph: SeparatrixGraph) -> int:
    if graph.regular_count == 0:
        raise NoRegularVertices("graph has no regular vertices to remove")
    return rank_separatrices(graph)[0]


def choose_min_drift(graph: SeparatrixGraph, defect: Defect) -> RepairDirection:
    """Repair direction whose strip drifts least; CCW wins ties."""
    drifts = {}
    for direction in DIRECTIONS:
        try:
            drifts[direction] = compute_region(graph, defect, direction).drift
        except RepairBlocked as e:
            logger.debug(f"{direction.value} repair of {defect} unavailable: {e}")
    if not drifts:
        raise Stuck(f"defect at vertex {defect.vertex} slot {defect.slot} cannot be repaired")
    return min(drifts, key=lambda d: (drifts[d], DIRECTIONS.index(d)))


def rank_delete_configs(graph: SeparatrixGraph, separatrix: int) -> List[Tuple[DeleteConfig, float]]:
    """Feasible delete configurations of a separatrix by increasing repair drift.

    Each configuration is applied tentatively and rolled back.
    """
    ranked = []
    for index, config in enumerate(ALL_DELETE_CONFIGS):
        with graph.transaction() as entries:
            try:
                record = delete_separatrix(graph, separatrix, config)
                ranked.append((record.entry.drift, index, config))
            except RepairImpossible as e:
                logger.debug(f"Delete {separatrix} {config} unavailable: {e}")
        graph.undo(entries)
    return [(config, drift) for drift, _, config in sorted(ranked)]


def _switch_options(graph: SeparatrixGraph) -> List[RepairDirection]:
    try:
        preferred = choose_min_drift(graph, graph.defect_list(DefectKind.S)[0])
    except Stuck:
        return []
    return [preferred, preferred.other]


@dataclass
class _Frame:
    """A node of the search tree: options in preference order and those that failed."""
    options: List[Any]
    frozen: Set[Any] = field(default_factory=set)
    chosen: Any = None
    applied: Optional[OperationRecord] = None

    def next_option(self) -> Any:
        for option in self.options:
            if option not in self.frozen:
                return option
        return None


@dataclass
class SimplifyResult:
    graph: SeparatrixGraph
    log: List[OperationLogEntry]
    trace: List[StepStats]
    stop_reason: StopReason
    records: List[OperationRecord] = field(default_factory=list, repr=False)
    backtracks: int = 0

    @property
    def macro_operations(self) -> int:
        return max(0, len(self.trace) - 1)


class GreedySimplifier:
    """Repeats macro-operations chosen by the drift heuristics until a stop criterion fires.

    Within a macro-operation the choices form a tree. A failed switch freezes
    its option; when a node runs out of options the parent's operation is
    undone and frozen in turn. Frozen sets start empty for every separatrix.
    """

    def __init__(self, stop: StopCriteria, energy: Optional[EnergyConfig] = None):
        self.stop = stop
        self.energy = energy or EnergyConfig()
        self.backtracks = 0

    def _stats(self, graph: SeparatrixGraph, step: int, initial: int,
               separatrix: Optional[int] = None, switches: int = 0) -> StepStats:
        regular = graph.regular_count
        return StepStats(
            step=step,
            separatrix=separatrix,
            regular_vertices=regular,
            energy=energy_of(graph, self.energy),
            total_drift=total_drift(graph),
            switches=switches,
            reduction_percent=100.0 * (1.0 - regular / initial) if initial else 0.0,
        )

    def search_root(self, graph: SeparatrixGraph, separatrix: int, macro: int) -> Optional[List[OperationRecord]]:
        """Depth-first search for a terminated macro-operation starting with ``separatrix``.

        Returns the applied records, or None with the graph unchanged.
        """
        root = _Frame(options=[config for config, _ in rank_delete_configs(graph, separatrix)])
        stack = [root]
        while stack:
            frame = stack[-1]
            option = frame.next_option()
            if option is None:
                stack.pop()
                if stack:
                    parent = stack[-1]
                    undo_record(graph, parent.applied)
                    self.backtracks += 1
                    parent.frozen.add(parent.chosen)
                    parent.applied = parent.chosen = None
                continue
            try:
                if frame is root:
                    record = delete_separatrix(graph, separatrix, option, macro=macro)
                else:
                    record = switch_separatrix(graph, option, macro=macro)
            except (RepairBlocked, RepairImpossible) as e:
                logger.debug(f"Option {option} frozen at depth {len(stack) - 1}: {e}")
                frame.frozen.add(option)
                continue
            record.frozen = frozenset(frame.frozen)
            frame.chosen, frame.applied = option, record
            if record.entry.outcome is OperationOutcome.TERMINATED:
                return [f.applied for f in stack]
            stack.append(_Frame(options=_switch_options(graph)))
        return None

    def run(self, graph: SeparatrixGraph) -> SimplifyResult:
        work = graph.copy()
        initial = work.regular_count
        records: List[OperationRecord] = []
        trace = [self._stats(work, 0, initial)]
        macro = 0
        while True:
            if self.stop.regular_target_reached(work.regular_count, initial):
                reason = StopReason.TARGET_REACHED
                break
            if work.regular_count == 0:
                reason = StopReason.NO_REGULAR_VERTICES
                break
            if self.stop.max_macro_ops is not None and macro >= self.stop.max_macro_ops:
                reason = StopReason.MAX_MACRO_OPS
                break

            found = None
            for separatrix in rank_separatrices(work):
                applied = self.search_root(work, separatrix, macro + 1)
                if applied is not None:
                    found = (separatrix, applied)
                    break
                logger.info(f"No terminated macro-operation starts at separatrix {separatrix}")
            if found is None:
                reason = StopReason.NO_PROGRESS
                break

            separatrix, applied = found
            if self.stop.max_drift is not None and max_edge_drift(work) > self.stop.max_drift:
                undo_records(work, applied)
                logger.info(
                    f"Macro-operation {macro + 1} undone: drift exceeds {self.stop.max_drift}"
                )
                reason = StopReason.MAX_DRIFT
                break

            macro += 1
            records.extend(applied)
            switches = len(applied) - 1
            trace.append(self._stats(work, macro, initial, separatrix, switches))
            logger.info(
                f"Macro-operation {macro}: separatrix {separatrix}, {switches} switches, "
                f"{work.regular_count} regular vertices"
            )

        logger.info(f"Greedy simplification stopped ({reason.value}) after {macro} macro-operations")
        return SimplifyResult(
            graph=work,
            log=[r.entry for r in records],
            trace=trace,
            stop_reason=reason,
            records=records,
            backtracks=self.backtracks,
        )


def greedy_simplify(
    graph: SeparatrixGraph,
    stop: StopCriteria,
    energy: Optional[EnergyConfig] = None,
) -> SimplifyResult:
    """Simplify a copy of ``graph``; the input is left untouched."""
    return GreedySimplifier(stop, energy).run(graph)


@dataclass
class OracleResult:
    status: OracleStatus
    nodes_visited: int
    energy: Optional[float] = None
    log: List[OperationLogEntry] = field(default_factory=list)
    graph: Optional[SeparatrixGraph] = None


class ExhaustiveOracle:
    """Enumerates every single macro-operation: 4n roots, each with its binary tree of switches.

    Roots are visited by separatrix id then delete configuration, switches
    CCW before CW. The first leaf of minimum energy wins.
    """

    def __init__(self, energy: Optional[EnergyConfig] = None, node_budget: Optional[int] = None):
        self.energy = energy or EnergyConfig()
        self.node_budget = node_budget if node_budget is not None else get_settings().ORACLE_NODE_BUDGET
        self.nodes_visited = 0
        self._best_energy: Optional[float] = None
        self._best_log: List[OperationLogEntry] = []

    def _visit(self) -> None:
        self.nodes_visited += 1
        if self.nodes_visited > self.node_budget:
            raise BudgetExceeded(
                f"oracle visited more than {self.node_budget} nodes",
                nodes_visited=self.nodes_visited,
                partial=self._partial(),
            )

    def _partial(self) -> OracleResult:
        return OracleResult(
            status=OracleStatus.BUDGET_EXCEEDED,
            nodes_visited=self.nodes_visited,
            energy=self._best_energy,
            log=list(self._best_log),
        )

    def _leaf(self, graph: SeparatrixGraph, path: List[OperationRecord]) -> None:
        value = energy_of(graph, self.energy)
        if self._best_energy is None or value < self._best_energy:
            self._best_energy = value
            self._best_log = [r.entry for r in path]

    def _explore(self, graph: SeparatrixGraph, path: List[OperationRecord]) -> None:
        # frame = [next direction index, record applied from this frame]
        stack: List[List[Any]] = [[0, None]]
        while stack:
            frame = stack[-1]
            if frame[1] is not None:
                undo_record(graph, frame[1])
                path.pop()
                frame[1] = None
            if frame[0] >= len(DIRECTIONS):
                stack.pop()
                continue
            direction = DIRECTIONS[frame[0]]
            frame[0] += 1
            self._visit()
            try:
                record = switch_separatrix(graph, direction)
            except RepairBlocked:
                continue
            path.append(record)
            if record.entry.outcome is OperationOutcome.TERMINATED:
                self._leaf(graph, path)
                undo_record(graph, record)
                path.pop()
                continue
            frame[1] = record
            stack.append([0, None])

    def search(self, graph: SeparatrixGraph) -> OracleResult:
        work = graph.copy()
        self.nodes_visited = 0
        self._best_energy, self._best_log = None, []
        for separatrix in sorted(work.separatrices):
            for config in ALL_DELETE_CONFIGS:
                self._visit()
                try:
                    root = delete_separatrix(work, separatrix, config)
                except RepairImpossible:
                    continue
                path = [root]
                self._explore(work, path)
                undo_record(work, root)

        if self._best_energy is None:
            logger.info(f"Oracle found no terminated macro-operation in {self.nodes_visited} nodes")
            return OracleResult(status=OracleStatus.NO_SOLUTION, nodes_visited=self.nodes_visited)

        best = graph.copy()
        apply_log(best, self._best_log)
        return OracleResult(
            status=OracleStatus.SOLVED,
            nodes_visited=self.nodes_visited,
            energy=self._best_energy,
            log=list(self._best_log),
            graph=best,
        )


def exhaustive_search(
    graph: SeparatrixGraph,
    energy: Optional[EnergyConfig] = None,
    node_budget: Optional[int] = None,
) -> OracleResult:
    """Best single macro-operation; raises BudgetExceeded with the partial best."""
    return ExhaustiveOracle(energy, node_budget).search(graph)


def oracle_report(
    graph: SeparatrixGraph,
    energy: Optional[EnergyConfig] = None,
    node_budget: Optional[int] = None,
) -> OracleReport:
    """Compare the oracle optimum with the greedy result of a single macro-operation."""
    energy = energy or EnergyConfig()
    budget = node_budget if node_budget is not None else get_settings().ORACLE_NODE_BUDGET
    greedy = greedy_simplify(graph, StopCriteria(max_macro_ops=1), energy)
    greedy_energy = energy_of(greedy.graph, energy)
    try:
        result = exhaustive_search(graph, energy, budget)
    except BudgetExceeded as e:
        logger.warning(f"Oracle budget exhausted: {e}")
        result = e.partial
    gap = None
    if result.energy is not None:
        gap = greedy_energy - result.energy
    return OracleReport(
        status=result.status,
        nodes_visited=result.nodes_visited,
        node_budget=budget,
        input_energy=energy_of(graph, energy),
        oracle_energy=result.energy,
        greedy_energy=greedy_energy,
        energy_gap=gap,
        oracle_log=result.log,
        greedy_log=greedy.log,
    )
