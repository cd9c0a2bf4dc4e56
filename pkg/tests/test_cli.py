import json

import pytest

from sepgraph.cli.main import SCHEMA_MODELS, main
from sepgraph.services.error_handler import ExitCode


@pytest.fixture
def dipole_obj(tmp_path):
    path = tmp_path / "dipole.obj"
    assert main(["gen", "dipole", "6", "6", str(path)]) == ExitCode.OK
    return path


def _records(path):
    return [line.split()[0] for line in path.read_text().splitlines() if line.strip()]


def _without_manifest(path):
    document = json.loads(path.read_text())
    document.pop("manifest")
    return document


def test_gen_counts(tmp_path):
    cube = tmp_path / "cube.obj"
    assert main(["gen", "cube", "3", str(cube)]) == ExitCode.OK
    assert _records(cube).count("v") == 56

    torus = tmp_path / "torus.obj"
    assert main(["gen", "torus", "8", "8", str(torus)]) == ExitCode.OK
    records = _records(torus)
    assert records.count("v") == 64
    assert records.count("f") == 64


def test_gen_errors(tmp_path):
    out = str(tmp_path / "x.obj")
    assert main(["gen", "dipole", "4", "4", out]) == ExitCode.TOO_SMALL
    assert main(["gen", "cube", "3", "4", out]) == ExitCode.USAGE


def test_extract_cube(tmp_path, capsys):
    mesh = tmp_path / "cube.obj"
    main(["gen", "cube", "2", str(mesh)])
    capsys.readouterr()
    out = tmp_path / "cube.json"
    assert main(["extract", str(mesh), str(out), "--svg"]) == ExitCode.OK

    stats = json.loads(capsys.readouterr().out)
    assert stats["singularities"] == 8
    assert stats["separatrices"] == 12
    assert stats["regular_vertices"] == 0
    assert stats["euler_characteristic"] == 2
    assert (tmp_path / "cube.svg").read_text().lstrip().startswith("<?xml")

    document = json.loads(out.read_text())
    assert document["manifest"]["command"] == "extract"
    assert len(document["manifest"]["input_sha256"]) == 64
    assert len(document["separatrices"]) == 12


def test_extract_regular_torus_is_empty(tmp_path, capsys):
    mesh = tmp_path / "torus.obj"
    main(["gen", "torus", "6", "6", str(mesh)])
    assert main(["extract", str(mesh), str(tmp_path / "torus.json")]) == ExitCode.OK
    assert "empty graph" in capsys.readouterr().err


def test_extract_bad_meshes(tmp_path):
    triangle = tmp_path / "triangle.obj"
    triangle.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    assert main(["extract", str(triangle), str(tmp_path / "t.json")]) == ExitCode.NON_QUAD_FACE

    garbled = tmp_path / "garbled.obj"
    garbled.write_text("v 0 0 0\nvertex 1 0 0\n")
    assert main(["extract", str(garbled), str(tmp_path / "g.json")]) == ExitCode.PARSE_ERROR

    quad = tmp_path / "quad.obj"
    quad.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    assert main(["extract", str(quad), str(tmp_path / "q.json")]) == ExitCode.BOUNDARY_EDGE


def test_simplify_writes_graph_log_stats_and_svg(tmp_path, dipole_obj):
    out = tmp_path / "simple.json"
    assert main(["simplify", str(dipole_obj), str(out), "--max-macro-ops", "1"]) == ExitCode.OK

    document = json.loads(out.read_text())
    assert document["manifest"]["command"] == "simplify"
    assert document["manifest"]["config"]["stop"]["max_macro_ops"] == 1
    assert document["defects"] == []
    assert not any(v["kind"] == "regular4" for v in document["vertices"])

    log = [json.loads(line) for line in (tmp_path / "simple.log.jsonl").read_text().splitlines()]
    assert log[0]["op"] == "delete"
    assert log[-1]["outcome"] == "terminated"
    stats = [json.loads(line) for line in (tmp_path / "simple.stats.jsonl").read_text().splitlines()]
    assert [s["regular_vertices"] for s in stats] == [6, 0]
    assert (tmp_path / "simple.svg").exists()


def test_simplify_outputs_are_byte_identical(tmp_path, dipole_obj):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.json"
        assert main(["simplify", str(dipole_obj), str(out), "--target-regular", "0"]) == ExitCode.OK
        outputs.append([
            (tmp_path / f"{name}{suffix}").read_bytes()
            for suffix in (".json", ".log.jsonl", ".stats.jsonl", ".svg")
        ])
    assert outputs[0] == outputs[1]


def test_simplify_with_zero_macro_ops_matches_extract(tmp_path, dipole_obj):
    extracted = tmp_path / "extracted.json"
    simplified = tmp_path / "simplified.json"
    assert main(["extract", str(dipole_obj), str(extracted)]) == ExitCode.OK
    assert main(["simplify", str(dipole_obj), str(simplified), "--max-macro-ops", "0"]) == ExitCode.OK
    assert _without_manifest(extracted) == _without_manifest(simplified)
    assert (tmp_path / "simplified.log.jsonl").read_text() == ""


def test_simplify_stop_criteria_errors(tmp_path, dipole_obj):
    out = str(tmp_path / "out.json")
    assert main(["simplify", str(dipole_obj), out]) == ExitCode.USAGE
    assert main(["simplify", str(dipole_obj), out, "--target-percent", "150"]) == ExitCode.USAGE
    assert main(["simplify", str(dipole_obj), out, "--max-macro-ops", "1",
                 "--energy-lr", "0", "--energy-lw", "0"]) == ExitCode.USAGE


def test_simplify_reads_json_config(tmp_path, dipole_obj):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"stop": {"max_macro_ops": 1}, "energy": {"lambda_w": 2.0}}))
    out = tmp_path / "out.json"
    assert main(["simplify", str(dipole_obj), str(out), "--config", str(config)]) == ExitCode.OK
    manifest = json.loads(out.read_text())["manifest"]
    assert manifest["config"]["energy"]["lambda_w"] == 2.0


def test_simplify_rejects_broken_graph_document(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"vertices": 5}')
    assert main(["simplify", str(broken), str(tmp_path / "o.json"), "--max-macro-ops", "1"]) \
        == ExitCode.PARSE_ERROR


def test_replay_reproduces_simplify(tmp_path, dipole_obj):
    extracted = tmp_path / "extracted.json"
    simplified = tmp_path / "simplified.json"
    replayed = tmp_path / "replayed.json"
    main(["extract", str(dipole_obj), str(extracted)])
    main(["simplify", str(dipole_obj), str(simplified), "--target-regular", "0"])
    code = main([
        "replay", str(extracted), str(tmp_path / "simplified.log.jsonl"), str(replayed),
        "--mesh", str(dipole_obj),
    ])
    assert code == ExitCode.OK
    assert _without_manifest(replayed) == _without_manifest(simplified)


def test_simplify_continues_from_graph_document(tmp_path, dipole_obj):
    extracted = tmp_path / "extracted.json"
    main(["extract", str(dipole_obj), str(extracted)])
    from_mesh = tmp_path / "from_mesh.json"
    from_document = tmp_path / "from_document.json"
    main(["simplify", str(dipole_obj), str(from_mesh), "--max-macro-ops", "1"])
    assert main([
        "simplify", str(extracted), str(from_document), "--max-macro-ops", "1", "--mesh", str(dipole_obj),
    ]) == ExitCode.OK
    assert _without_manifest(from_document) == _without_manifest(from_mesh)


def test_oracle(tmp_path, dipole_obj):
    out = tmp_path / "oracle.json"
    assert main(["oracle", str(dipole_obj), str(out)]) == ExitCode.OK
    report = json.loads(out.read_text())
    assert report["status"] == "solved"
    assert report["energy_gap"] >= 0
    assert report["manifest"]["command"] == "oracle"

    assert main(["oracle", str(dipole_obj), str(out), "--node-budget", "3"]) == ExitCode.BUDGET_EXCEEDED
    assert json.loads(out.read_text())["status"] == "budget_exceeded"


def test_oracle_without_solution(tmp_path):
    cube = tmp_path / "cube.obj"
    main(["gen", "cube", "1", str(cube)])
    out = tmp_path / "oracle.json"
    assert main(["oracle", str(cube), str(out)]) == ExitCode.NO_SOLUTION
    assert json.loads(out.read_text())["nodes_visited"] == 48


def test_schema(tmp_path):
    assert main(["schema", str(tmp_path / "schemas")]) == ExitCode.OK
    for name in SCHEMA_MODELS:
        schema = json.loads((tmp_path / "schemas" / f"{name}.schema.json").read_text())
        assert "properties" in schema


def test_extract_rejects_undecodable_and_dangling_objs(tmp_path):
    binary = tmp_path / "binary.obj"
    binary.write_bytes(b"v 0 0 0\n\xff\xfe\n")
    assert main(["extract", str(binary), str(tmp_path / "b.json")]) == ExitCode.PARSE_ERROR

    dangling = tmp_path / "dangling.obj"
    dangling.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nf 1 2 3 9\n")
    assert main(["extract", str(dangling), str(tmp_path / "d.json")]) == ExitCode.PARSE_ERROR


def test_malformed_config_is_a_usage_error(tmp_path, dipole_obj):
    config = tmp_path / "run.json"
    config.write_text("{stop: ")
    out = str(tmp_path / "out.json")
    assert main(["simplify", str(dipole_obj), out, "--config", str(config)]) == ExitCode.USAGE
    assert main(["oracle", str(dipole_obj), out, "--config", str(config)]) == ExitCode.USAGE

    config.write_text(json.dumps({"stop": [1]}))
    assert main(["simplify", str(dipole_obj), out, "--config", str(config)]) == ExitCode.USAGE


def test_sidecar_manifests_accompany_non_json_outputs(tmp_path, dipole_obj):
    generated = json.loads((tmp_path / "dipole.manifest.json").read_text())
    assert generated["command"] == "gen"
    assert generated["config"] == {"kind": "dipole", "dims": [6, 6]}
    assert generated["outputs"] == ["dipole.obj"]
    assert generated["input_path"] is None

    out = tmp_path / "simple.json"
    assert main(["simplify", str(dipole_obj), str(out), "--max-macro-ops", "1"]) == ExitCode.OK
    sidecar = json.loads((tmp_path / "simple.manifest.json").read_text())
    embedded = json.loads(out.read_text())["manifest"]
    assert sidecar["outputs"] == ["simple.log.jsonl", "simple.stats.jsonl", "simple.svg"]
    assert embedded["outputs"] == []
    sidecar.pop("outputs")
    embedded.pop("outputs")
    assert sidecar == embedded
