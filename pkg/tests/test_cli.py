import io
import json

import pytest

from flagforge import charts, cli
from flagforge.asymptotics import AsymptoticReport, asymptotic_report, synthetic_word
from flagforge.linalg import flag_to_json
from flagforge.tropical import ScaledLimit, ScalingSequence


def run(**kw):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(cli.RunConfig(**kw), out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, doc, name="in.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def test_flip_fixture_exact():
    code, out, _ = run(subcommand="flip", fixture="quadrilateral_m3")
    assert code == 0
    assert json.loads(out)["agreement"] == "exact"


def test_tree_type_fixture():
    code, out, _ = run(subcommand="tree-type", fixture="genus2_tree_type")
    doc = json.loads(out)
    assert code == 0
    assert doc["is_tree_type"] and doc["flip_set"] == ["e1", "f1"]


def test_validate_fixture_and_corrupted(tmp_path):
    code, out, _ = run(subcommand="validate", fixture="genus2_tree_type")
    assert code == 0 and json.loads(out)["violations"] == []
    doc = cli.load_fixture("genus2_tree_type")
    doc["shears"]["e2"][0] = {"poly": {"2": "1", "0": "3"}}
    code, out, _ = run(subcommand="validate", input=write(tmp_path, doc))
    assert code == 2
    assert json.loads(out)["violations"][0]["kind"] == "mismatch"


def test_lambda_plus_fixture():
    code, out, _ = run(subcommand="lambda-plus", fixture="genus2_tree_type")
    assert code == 0
    assert json.loads(out)["flipped"] == ["e1", "f1"]


def test_holonomy_fixture():
    code, out, _ = run(subcommand="holonomy", fixture="holonomy_word_m3")
    doc = json.loads(out)
    assert code == 0 and doc["totally_positive"]
    assert len(doc["matrix"]) == 3


def test_ratios_round_trip(tmp_path):
    chart = charts.ChartCoordinates.from_json(cli.load_fixture("quadrilateral_m3"))
    flags = charts.reconstruct_configuration(chart)
    doc = {"polygon": chart.polygon.to_json(), "flags": [flag_to_json(f) for f in flags]}
    code, out, _ = run(subcommand="ratios", input=write(tmp_path, doc))
    got = json.loads(out)
    assert code == 0 and got["positive"]
    assert got["coordinates"] == chart.to_json()["coordinates"]


def test_bad_inputs(tmp_path):
    code, _, err = run(subcommand="validate", input=write(tmp_path, "{not json"))
    assert code == 3 and "1:2" in err
    code, _, _ = run(subcommand="validate", input=write(tmp_path, {"schema": "other/v9"}))
    assert code == 3
    code, _, _ = run(subcommand="tree-type", input=write(tmp_path, {"m": 3}))
    assert code == 3
    code, _, _ = run(subcommand="asymptotics", input=write(tmp_path, {"m": 3, "word": [{"triangle": {}}]}))
    assert code == 3
    code, _, _ = run(subcommand="flip", input=str(tmp_path / "missing.json"))
    assert code == 3


def test_run_config_validation():
    with pytest.raises(cli.InputError):
        cli.RunConfig("asymptotics", samples=(20, 10))
    with pytest.raises(cli.InputError):
        cli.RunConfig("asymptotics", tolerance=0)


def test_asymptotics_csv_deterministic(tmp_path):
    kw = dict(subcommand="asymptotics", fixture="synthetic_word_m3", format="csv")
    code, first, _ = run(**kw)
    _, second, _ = run(**kw)
    assert code == 0 and first == second
    lines = first.splitlines()
    assert lines[0] == ",".join(cli.CSV_COLUMNS)
    assert [ln.split(",")[0] for ln in lines[1:4]] == ["10", "20", "40"]
    assert lines[-1].startswith("# precision: 512 bits")


def test_output_file_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert cli.run(cli.RunConfig("tree-type", fixture="genus2_tree_type", output=str(p))) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_emit_csv_header_only_and_rows():
    empty = AsymptoticReport(3, ScalingSequence(1), ScaledLimit.of(0))
    buf = io.StringIO()
    cli.emit_csv(empty, buf, 512)
    assert buf.getvalue().splitlines()[0] == "n,scaled_log_tr,scaled_log_tr_inv,target,delta"
    assert len(buf.getvalue().splitlines()) == 2
    rep = asymptotic_report(synthetic_word(3, 2), ScalingSequence(1), [10, 20])
    buf = io.StringIO()
    cli.emit_csv(rep, buf, 512)
    assert len(buf.getvalue().splitlines()) == 4


def test_main_argument_errors(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["flip"])
    assert info.value.code == 3
    with pytest.raises(SystemExit) as info:
        cli.main(["tree-type", "--fixture", "genus2_tree_type", "--format", "csv"])
    assert info.value.code == 3


def test_main_env_precision(monkeypatch, capsys):
    monkeypatch.setenv(cli.PRECISION_ENV, "256")
    assert cli.main(["asymptotics", "--fixture", "synthetic_word_m3", "--format", "csv", "--samples", "10,20"]) == 0
    assert "# precision: 256 bits" in capsys.readouterr().out
