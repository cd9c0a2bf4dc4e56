"""
Command-line front end: ``sepgraph extract|simplify|oracle|gen|replay|schema``.
"""
import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ValidationError

from ..__version__ import __version__
from ..config import get_settings
from ..crud.crud_graph_document import canonical_json, canonical_line, crud_graph_document
from ..crud.crud_quad_mesh import crud_quad_mesh
from ..models.quad_mesh import QuadMesh
from ..models.separatrix_graph import SeparatrixGraph
from ..schemas.graph_document import GraphDocument
from ..schemas.operation_log import OperationLogEntry, OracleReport, OracleStatus, StepStats
from ..schemas.run_manifest import RunManifest
from ..schemas.search_config import EnergyConfig, StopCriteria
from ..services.error_handler import BudgetExceeded, ConfigConflict, ExitCode, NoSolution, error_handler
from ..services.mesh_generators import generate_cube_grid, generate_dipole_grid, generate_torus_grid
from ..services.operations import apply_log
from ..services.rendering import save_svg
from ..services.search import greedy_simplify, oracle_report
from ..services.tracing import graph_stats, trace_separatrices

logger = logging.getLogger(__name__)

SCHEMA_MODELS = {
    "graph_document": GraphDocument,
    "operation_log_entry": OperationLogEntry,
    "step_stats": StepStats,
    "oracle_report": OracleReport,
    "run_manifest": RunManifest,
    "stop_criteria": StopCriteria,
    "energy_config": EnergyConfig,
}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest(command: str, input_path: Optional[Path], config: Dict[str, Any]) -> RunManifest:
    return RunManifest(
        command=command,
        input_path=str(input_path) if input_path is not None else None,
        input_sha256=_sha256(input_path) if input_path is not None else None,
        config=config,
        tool_version=__version__,
    )


def _load_input(path: Path, mesh_path: Optional[Path]) -> Tuple[SeparatrixGraph, Optional[QuadMesh]]:
    """A mesh is traced; a graph document is loaded, optionally re-attached to its mesh."""
    if path.suffix.lower() == ".obj":
        mesh = crud_quad_mesh.load(path)
        return trace_separatrices(mesh), mesh
    mesh = crud_quad_mesh.load(mesh_path) if mesh_path is not None else None
    return crud_graph_document.load(path, mesh), mesh


def _write_lines(path: Path, models: Sequence[BaseModel]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        for model in models:
            stream.write(canonical_line(model))


def _sibling(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


def _write_sidecar(out: Path, manifest: RunManifest, outputs: Sequence[Path]) -> None:
    """Manifest for outputs that cannot embed one, written to ``<out>.manifest.json``."""
    sidecar = manifest.model_copy(update={"outputs": [p.name for p in outputs]})
    _sibling(out, ".manifest.json").write_text(canonical_json(sidecar), encoding="utf-8")


def _read_config(args: argparse.Namespace, section: str) -> Dict[str, Any]:
    if getattr(args, "config", None) is None:
        return {}
    try:
        document = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ConfigConflict(f"config {args.config} is not valid JSON: {e}") from e
    if not isinstance(document, dict) or not isinstance(document.get(section, {}), dict):
        raise ConfigConflict(f"config {args.config} needs an object under '{section}'")
    return dict(document.get(section, {}))


def _stop_criteria(args: argparse.Namespace) -> StopCriteria:
    values = _read_config(args, "stop")
    for name in ("target_regular", "target_percent", "max_drift", "max_macro_ops"):
        if getattr(args, name) is not None:
            values[name] = getattr(args, name)
    try:
        return StopCriteria(**values)
    except ValidationError as e:
        raise ConfigConflict(f"invalid stop criteria: {e.errors()[0]['msg']}") from e


def _energy_config(args: argparse.Namespace) -> EnergyConfig:
    values = _read_config(args, "energy")
    if args.energy_lr is not None:
        values["lambda_r"] = args.energy_lr
    if args.energy_lw is not None:
        values["lambda_w"] = args.energy_lw
    try:
        return EnergyConfig(**values)
    except ValidationError as e:
        raise ConfigConflict(f"invalid energy weights: {e.errors()[0]['msg']}") from e


def cmd_extract(args: argparse.Namespace) -> ExitCode:
    source = Path(args.mesh)
    mesh = crud_quad_mesh.load(source)
    graph = trace_separatrices(mesh)
    out = Path(args.out)
    manifest = _manifest("extract", source, {})
    crud_graph_document.save(graph, out, manifest)
    stats = graph_stats(graph)
    if graph.is_empty:
        print("empty graph: the mesh has no irregular vertices", file=sys.stderr)
    if args.svg:
        svg = _sibling(out, ".svg")
        save_svg(graph, svg)
        _write_sidecar(out, manifest, [svg])
    sys.stdout.write(canonical_line(stats))
    return ExitCode.OK


def cmd_simplify(args: argparse.Namespace) -> ExitCode:
    stop = _stop_criteria(args)
    energy = _energy_config(args)
    source = Path(args.input)
    graph, _ = _load_input(source, Path(args.mesh) if args.mesh else None)
    result = greedy_simplify(graph, stop, energy)

    out = Path(args.out)
    config = {"stop": stop.model_dump(mode="json"), "energy": energy.model_dump(mode="json")}
    manifest = _manifest("simplify", source, config)
    crud_graph_document.save(result.graph, out, manifest)
    log, stats, svg = _sibling(out, ".log.jsonl"), _sibling(out, ".stats.jsonl"), _sibling(out, ".svg")
    _write_lines(log, result.log)
    _write_lines(stats, result.trace)
    save_svg(result.graph, svg)
    _write_sidecar(out, manifest, [log, stats, svg])

    last = result.trace[-1]
    print(
        f"{result.macro_operations} macro-operations, stop: {result.stop_reason.value}, "
        f"regular vertices {result.trace[0].regular_vertices} -> {last.regular_vertices} "
        f"({last.reduction_percent:.1f}% reduction), energy {last.energy:.6g}",
        file=sys.stderr,
    )
    return ExitCode.OK


def cmd_oracle(args: argparse.Namespace) -> ExitCode:
    energy = _energy_config(args)
    source = Path(args.input)
    graph, _ = _load_input(source, Path(args.mesh) if args.mesh else None)
    budget = args.node_budget if args.node_budget is not None else get_settings().ORACLE_NODE_BUDGET
    report = oracle_report(graph, energy, budget)
    config = {"energy": energy.model_dump(mode="json"), "node_budget": budget}
    report = report.model_copy(update={"manifest": _manifest("oracle", source, config)})
    Path(args.out).write_text(canonical_json(report), encoding="utf-8")

    print(
        f"oracle {report.status.value} after {report.nodes_visited} nodes; "
        f"greedy energy {report.greedy_energy:.6g}, gap {report.energy_gap}",
        file=sys.stderr,
    )
    # the report is written first; these only set the exit code
    if report.status is OracleStatus.BUDGET_EXCEEDED:
        raise BudgetExceeded(f"node budget {budget} exhausted", nodes_visited=report.nodes_visited)
    if report.status is OracleStatus.NO_SOLUTION:
        raise NoSolution(f"no terminated macro-operation in {report.nodes_visited} nodes")
    return ExitCode.OK


def cmd_gen(args: argparse.Namespace) -> ExitCode:
    dims: List[int] = args.dims
    expected = {"torus": 2, "cube": 1, "dipole": 2}[args.kind]
    if len(dims) != expected:
        raise ConfigConflict(f"{args.kind} takes {expected} dimension(s), got {len(dims)}")
    if args.kind == "torus":
        mesh = generate_torus_grid(*dims)
    elif args.kind == "cube":
        mesh = generate_cube_grid(*dims)
    else:
        mesh = generate_dipole_grid(*dims)
    out = Path(args.out)
    crud_quad_mesh.save(mesh, out)
    _write_sidecar(out, _manifest("gen", None, {"kind": args.kind, "dims": dims}), [out])
    logger.info(f"Generated {args.kind} mesh with {mesh.vertex_count} vertices")
    return ExitCode.OK


def cmd_replay(args: argparse.Namespace) -> ExitCode:
    mesh = crud_quad_mesh.load(Path(args.mesh)) if args.mesh else None
    source = Path(args.graph)
    graph = crud_graph_document.load(source, mesh)
    entries = []
    with open(args.log, "r", encoding="utf-8") as stream:
        for line in stream:
            if line.strip():
                entries.append(OperationLogEntry.model_validate_json(line))
    apply_log(graph, entries)
    crud_graph_document.save(graph, Path(args.out), _manifest("replay", source, {"log": str(args.log)}))
    return ExitCode.OK


def cmd_schema(args: argparse.Namespace) -> ExitCode:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, model in SCHEMA_MODELS.items():
        schema = model.model_json_schema()
        (outdir / f"{name}.schema.json").write_text(
            json.dumps(schema, sort_keys=True, indent=2) + "\n", encoding="utf-8",
        )
    return ExitCode.OK


def _add_energy_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--energy-lr", type=float, default=None, help="weight on the regular vertex count")
    parser.add_argument("--energy-lw", type=float, default=None, help="weight on the summed drift")
    parser.add_argument("--mesh", default=None, help="OBJ mesh of a graph document input")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sepgraph", description="Separatrix graph extraction and simplification")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    extract = commands.add_parser("extract", help="trace the separatrix graph of an OBJ quad mesh")
    extract.add_argument("mesh")
    extract.add_argument("out")
    extract.add_argument("--svg", action="store_true", help="also draw the graph")
    extract.set_defaults(handler=cmd_extract)

    simplify = commands.add_parser("simplify", help="greedy simplification of a mesh or graph")
    simplify.add_argument("input")
    simplify.add_argument("out")
    simplify.add_argument("--target-regular", type=int, default=None)
    simplify.add_argument("--target-percent", type=float, default=None)
    simplify.add_argument("--max-drift", type=float, default=None)
    simplify.add_argument("--max-macro-ops", type=int, default=None)
    simplify.add_argument("--config", default=None, help="JSON file with 'stop' and 'energy' objects")
    _add_energy_flags(simplify)
    simplify.set_defaults(handler=cmd_simplify)

    oracle = commands.add_parser("oracle", help="best single macro-operation versus greedy")
    oracle.add_argument("input")
    oracle.add_argument("out")
    oracle.add_argument("--node-budget", type=int, default=None)
    oracle.add_argument("--config", default=None, help="JSON file with an 'energy' object")
    _add_energy_flags(oracle)
    oracle.set_defaults(handler=cmd_oracle)

    gen = commands.add_parser("gen", help="write a synthetic quad mesh")
    gen.add_argument("kind", choices=["torus", "cube", "dipole"])
    gen.add_argument("dims", type=int, nargs="+")
    gen.add_argument("out")
    gen.set_defaults(handler=cmd_gen)

    replay = commands.add_parser("replay", help="apply an operation log to a graph")
    replay.add_argument("graph")
    replay.add_argument("log")
    replay.add_argument("out")
    replay.add_argument("--mesh", default=None, help="OBJ mesh the graph was traced from")
    replay.set_defaults(handler=cmd_replay)

    schema = commands.add_parser("schema", help="write JSON schemas of the output documents")
    schema.add_argument("outdir")
    schema.set_defaults(handler=cmd_schema)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.getLevelName(get_settings().LOG_LEVEL.upper())
    if not isinstance(level, int):
        level = logging.WARNING
    if args.quiet:
        level = logging.ERROR
    elif args.verbose:
        level = max(logging.DEBUG, level - 10 * args.verbose)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    try:
        return int(args.handler(args))
    except Exception as e:
        return int(error_handler.handle(e, context=f"sepgraph {args.command}"))


if __name__ == "__main__":
    sys.exit(main())
