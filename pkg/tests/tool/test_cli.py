import asyncio
import json

import pytest

from app.exceptions import InputError
from main import TOOLS, build_parser, main, parse_overrides

from tests.conftest import SCENES


def test_parse_overrides():
    overrides = parse_overrides(["glancing.touch_tolerance=1e-7", "runtime.log_level=DEBUG"])
    assert overrides == {"glancing.touch_tolerance": 1e-7, "runtime.log_level": "DEBUG"}
    assert parse_overrides(None) == {}
    with pytest.raises(InputError):
        parse_overrides(["touch_tolerance=1e-7"])
    with pytest.raises(InputError):
        parse_overrides(["glancing.touch_tolerance"])


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_analyze_gcc_scene(tmp_path, capsys):
    code = main(["analyze", "--scene", str(SCENES / "gcc_cross.json"), "--out", str(tmp_path)])
    assert code == 0
    assert "no glancing lines: geometric control holds" in capsys.readouterr().out
    report = json.loads((tmp_path / "glancing_report.json").read_text())
    assert report["G_empty"] is True
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "analyze"


def test_predict_disk(tmp_path, capsys):
    code = main(
        ["predict", "--scene", str(SCENES / "disk.json"), "--betas", "9", "--out", str(tmp_path)]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "one_sided_regime" in out
    assert "alpha = 0.92" in out
    assert (tmp_path / "prediction.json").exists()
    assert (tmp_path / "rates.csv").exists()


def test_genericity_axis_square(tmp_path, capsys):
    code = main(["genericity", "--scene", str(SCENES / "square.json"), "--out", str(tmp_path)])
    assert code == 0
    assert "not Q'" in capsys.readouterr().out
    assert (tmp_path / "rotations.csv").exists()


def test_average_disk(tmp_path, capsys):
    code = main(["average", "--scene", str(SCENES / "disk.json"), "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "1 zero intervals" in out
    assert (tmp_path / "profile_1_0.csv").exists()


def test_simulate_undamped_reference(tmp_path, capsys):
    code = main(
        ["simulate", "--undamped", "--grid-size", "16", "--final-time", "0.2", "--out", str(tmp_path)]
    )
    assert code == 0
    runs = json.loads((tmp_path / "runs.json").read_text())
    assert [r["label"] for r in runs["runs"]] == ["undamped"]
    assert runs["runs"][0]["ratio"] == pytest.approx(1.0, rel=1e-9)


def test_simulate_needs_a_scene(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path)]) == 2
    assert "Error:" in capsys.readouterr().err


@pytest.mark.slow
def test_resolvent_constant_family(tmp_path, capsys):
    code = main(
        [
            "resolvent", "--family", "constant",
            "--lambda-min", "10", "--lambda-max", "100", "--lambda-points", "2",
            "--trials", "3",
            "--tol", "resolvent.grid_size=64", "--tol", "resolvent.coarse_points=20",
            "--out", str(tmp_path),
        ]
    )
    assert code == 0
    assert "fitted exponent -1.0000" in capsys.readouterr().out
    document = json.loads((tmp_path / "fit.json").read_text())
    assert document["pairing"]["violations"] == 0
    assert document["strict_fit"] is False


def test_malformed_scene_exits_with_input_error(tmp_path, capsys):
    scene = tmp_path / "broken.json"
    scene.write_text("{ not json")
    assert main(["analyze", "--scene", str(scene), "--out", str(tmp_path)]) == 2
    assert capsys.readouterr().err.startswith("Error:")


def test_missing_scene_exits_with_input_error(tmp_path):
    assert main(["predict", "--scene", str(tmp_path / "nowhere.json")]) == 2


@pytest.mark.parametrize("override", ["nodot=1", "glancing.no_such_key=1", "glancing.touch_tolerance=-1"])
def test_bad_overrides_exit_with_input_error(tmp_path, override, capsys):
    code = main(
        ["analyze", "--scene", str(SCENES / "disk.json"), "--tol", override, "--out", str(tmp_path)]
    )
    assert code == 2
    assert "Error:" in capsys.readouterr().err


def test_resolvent_rejects_inverted_lambda_range(tmp_path):
    code = main(
        ["resolvent", "--family", "constant", "--lambda-min", "100", "--lambda-max", "10", "--out", str(tmp_path)]
    )
    assert code == 2


def test_subcommands_come_from_the_tools():
    assert TOOLS.names == ["analyze", "average", "resolvent", "predict", "genericity", "simulate"]
    assert TOOLS.get_tool("predict").summary.startswith("Predict the polynomial energy-decay exponent")


def test_collection_rejects_missing_arguments_and_unknown_tools():
    result = asyncio.run(TOOLS.execute(name="analyze", tool_input={}))
    assert result.exit_code == 2
    assert "scene" in result.error
    assert asyncio.run(TOOLS.execute(name="plot")).exit_code == 2
