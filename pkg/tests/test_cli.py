from __future__ import annotations

import json

import pytest

from gaugeccr.cli import COMMANDS, main, render_json, render_text, run, verify_report
from gaugeccr.scenario import FIXTURE_DIR, bundled_fixtures

FIXTURES = bundled_fixtures()


def write(tmp_path, name, data):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


def test_bundled_fixtures_present():
    for name in ("prop48_m2", "prop48_m3", "prop48_m4", "thm410_m2", "thm410_m3", "hk_minkowski", "twodim_connected"):
        assert name in FIXTURES


@pytest.mark.parametrize("name", FIXTURES)
def test_every_fixture_validates_and_rechecks(name):
    for command in COMMANDS:
        report, code = run(name, command)
        if code == 3:
            # analyses that need scenario features the fixture lacks
            assert report["error"]["kind"] == "precondition"
            continue
        assert code == 0, report
        assert all(ok for _, ok in verify_report(report)), report


def test_locality_report_prop48_m2():
    report, code = run("prop48_m2", "locality")
    assert code == 0
    (res,) = report["results"]
    assert res["h2c_dims"] == [2, 1] and res["verdict"] == "NOT injective"


def test_nogo_report_scalar():
    report, _ = run("thm410_m3", "nogo")
    (res,) = report["results"]
    assert res["ideal_certificate"]["scalar"] == {"order": 1, "coeffs": ["-2"]}


def test_hk_report_lists_material_charges():
    report, _ = run("hk_minkowski", "hk")
    (res,) = report["results"]
    assert all(m["injective"] for m in res["morphisms"])
    mats = {o["name"]: o["material_charges"] for o in res["objects"]}
    assert mats["cone_complement"]["divisible_gens"] == [["1"]]


def test_empty_scenario_is_valid(tmp_path):
    ref = write(tmp_path, "empty", {})
    report, code = run(ref, "validate")
    assert code == 0
    assert report["results"] == [{"objects": [], "morphisms": [], "analyses": 0, "valid": True}]


def test_analysis_without_arguments_covers_everything(tmp_path):
    data = {
        "objects": [
            {"name": "X", "space": "circle", "dim_m": 3},
            {"name": "Y", "space": "point", "dim_m": 3},
        ],
        "morphisms": [{"name": "f", "from": "X", "to": "Y", "vertex_map": [0, 0, 0]}],
        "analyses": [{"command": "locality"}, {"command": "model"}, {"command": "cohomology"}],
    }
    ref = write(tmp_path, "bare", data)
    report, code = run(ref, "locality")
    assert code == 0
    assert [r["morphism"] for r in report["results"]] == ["f"]
    assert report["results"][0]["verdict"] == "NOT injective"
    for command in ("model", "cohomology"):
        report, code = run(ref, command)
        assert code == 0 and len(report["results"]) == 2


def test_compatibility_mutation_is_rejected(tmp_path):
    data = json.loads((FIXTURE_DIR / "thm410_m3.json").read_text())
    for obj in data["objects"]:
        if obj["name"] == "wedge":
            obj["rho"] = [["1"]]
    report, code = run(write(tmp_path, "mutated", data), "validate")
    assert code == 2
    assert report["error"]["kind"] == "compatibility"
    assert report["error"]["entity"] == "f1"


@pytest.mark.parametrize("mutation, kind", [
    (lambda d: d["objects"][0].update(space="klein_bottle"), "unknown_constructor"),
    (lambda d: d["objects"][0].update(rho=[["1"]]), "shape_mismatch"),
    (lambda d: d["morphisms"][0].update(to="nowhere"), "unknown_reference"),
    (lambda d: d["objects"].append(dict(d["objects"][1])), "duplicate_name"),
])
def test_validation_kinds(tmp_path, mutation, kind):
    data = json.loads((FIXTURE_DIR / "thm410_m3.json").read_text())
    mutation(data)
    report, code = run(write(tmp_path, "bad", data), "validate")
    assert code == 2 and report["error"]["kind"] == kind


def test_io_and_parse_errors(tmp_path):
    assert run(str(tmp_path / "missing.json"), "validate")[1] == 1
    assert run(write(tmp_path, "broken", "{not json"), "validate")[1] == 1


def test_precondition_failure(tmp_path):
    report, code = run("prop48_m2", "hk")
    assert code == 3 and report["error"]["kind"] == "precondition"


def test_main_exit_codes(capsys):
    assert main(["locality", "prop48_m2"]) == 0
    assert main(["locality", "prop48_m2", "--fail-on-nonlocal"]) == 4
    assert main(["locality", "twodim_connected", "--fail-on-nonlocal"]) == 0
    capsys.readouterr()


def test_determinism_and_parallel(capsys):
    main(["locality", *FIXTURES, "--format", "json"])
    first = capsys.readouterr().out
    main(["locality", *FIXTURES, "--format", "json", "--parallel", "2"])
    second = capsys.readouterr().out
    assert first == second
    for name in FIXTURES:
        a, _ = run(name, "model")
        b, _ = run(name, "model")
        assert render_json(a) == render_json(b)
        assert render_text(a) == render_text(b)


def test_fixtures_dir_flag(tmp_path, capsys):
    (tmp_path / "only.json").write_text((FIXTURE_DIR / "prop48_m2.json").read_text())
    assert main(["locality", "only", "--fixtures-dir", str(tmp_path), "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"][0]["h2c_dims"] == [2, 1]
