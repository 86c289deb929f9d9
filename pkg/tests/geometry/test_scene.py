import json

import pytest

from app.exceptions import SceneError
from app.geometry.scene import load_scene, parse_scene

from tests.conftest import SCENES


EXPECTED_KINDS = {
    "case_a_strip": "strip",
    "case_b_disk": "disk",
    "case_c_rotated_square": "polygon",
    "cusp": "superellipse",
    "disk": "disk",
    "gcc_cross": "union",
    "square": "polygon",
    "superellipse": "superellipse",
}


@pytest.mark.parametrize("name, kind", sorted(EXPECTED_KINDS.items()))
def test_bundled_scenes_load(name, kind):
    scene = load_scene(SCENES / f"{name}.json")
    assert scene.name == name
    assert scene.shape.kind == kind


def test_scene_field_uses_scene_exponent():
    scene = load_scene(SCENES / "superellipse.json")
    assert scene.field().beta == 2.0
    assert scene.field(beta=5.0).beta == 5.0
    assert scene.field().label == "superellipse"


def test_scene_options_feed_the_settings():
    scene = parse_scene(
        {
            "shape": {"kind": "disk", "center": [0.5, 0.5], "radius": 0.2},
            "options": {"glancing.touch_tolerance": 1e-7},
        }
    )
    settings = scene.settings({"averaging.max_rounds": 5})
    assert settings.glancing.touch_tolerance == 1e-7
    assert settings.averaging.max_rounds == 5


def test_missing_scene(tmp_path):
    with pytest.raises(SceneError, match="not found"):
        load_scene(tmp_path / "nope.json")


def test_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"shape": {"kind": "disk",', encoding="utf-8")
    with pytest.raises(SceneError, match="malformed JSON"):
        load_scene(path)


def test_scene_must_be_an_object(tmp_path):
    path = tmp_path / "list.json"
    path.write_text(json.dumps([1, 2]), encoding="utf-8")
    with pytest.raises(SceneError):
        load_scene(path)


@pytest.mark.parametrize(
    "data",
    [
        {"shape": {"kind": "hexagon"}},
        {"shape": {"kind": "disk", "center": [0.5, 0.5], "radius": -1}},
        {"shape": {"kind": "strip", "normal": [1, 0], "lo": 0.3, "hi": 0.2}},
        {"shape": {"kind": "disk", "center": [0.5, 0.5], "radius": 0.2}, "options": {"glancing.nope": 1}},
        {"shape": {"kind": "disk", "center": [0.5, 0.5], "radius": 0.2}, "beta": 0},
    ],
)
def test_invalid_scenes(data):
    with pytest.raises(SceneError):
        parse_scene(data)


def test_scene_must_embed_in_the_torus():
    with pytest.raises(SceneError, match="properly projected"):
        parse_scene({"shape": {"kind": "disk", "center": [0.5, 0.5], "radius": 0.6}})
