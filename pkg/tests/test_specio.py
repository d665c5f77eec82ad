import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from components.moment import LSpec
from scripts.build_presets import build
from scripts.check_spec import summarize
from utils.errors import SpecInvalid
from utils.specio import (
    dump_spec,
    dumps_spec,
    grid_frame,
    load_spec,
    pack_lower,
    spec_from_dict,
    summary_frame,
    unpack_lower,
)


def test_spec_file_round_trip(tmp_path, lwy):
    spec, lspec = lwy
    path = dump_spec(spec, tmp_path / "nested" / "lwy.json", lspec)
    loaded, loaded_l = load_spec(path)
    assert loaded == spec
    assert loaded_l == lspec


def test_spec_without_generators(tmp_path, taub_nut):
    spec, _ = taub_nut
    text = dumps_spec(spec)
    assert json.loads(text) == {"k": 1, "mode": "hyperkahler", "q": 1, "s": 3, "theta": [[1.0]]}
    path = tmp_path / "tn.json"
    path.write_text(text)
    assert load_spec(path)[1] is None


@pytest.mark.parametrize(
    "payload",
    [
        [1, 2, 3],
        {"s": 3, "k": 1, "theta": [[1.0]]},
        {"s": "three", "k": 1, "q": 1, "theta": [[1.0]]},
        {"s": 3, "k": 1, "q": 1, "theta": "one"},
        {"s": 3, "k": 1, "q": 1, "theta": [[0.0]]},
        {"s": 3, "k": 1, "q": 1, "theta": [[1.0]], "generators": "1"},
        {"s": 3, "k": 1, "q": 1, "theta": [[1.0]], "generators": [1.5]},
    ],
)
def test_malformed_specs(payload):
    with pytest.raises(SpecInvalid):
        spec_from_dict(payload)


def test_unreadable_files(tmp_path):
    with pytest.raises(SpecInvalid):
        load_spec(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecInvalid):
        load_spec(bad)


def test_generators_are_read():
    _, lspec = spec_from_dict({"s": 6, "k": 2, "q": 2, "theta": [[1, 0], [0, 1]], "generators": [1, 2]})
    assert lspec == LSpec((1, 2))


def test_grid_frame_layout():
    metrics = [np.diag([1.0, 2.0]), np.array([[1.0, 0.5], [0.5, 3.0]])]
    frame = grid_frame(["a", "b"], [[0.0, 1.0], [2.0, 3.0]], metrics)
    assert list(frame.columns) == ["a", "b", "g_00", "g_10", "g_11"]
    assert frame["g_10"].tolist() == [0.0, 0.5]
    assert list(grid_frame(["a"], np.zeros((0, 1)), []).columns) == ["a"]


def test_pack_and_unpack():
    m = np.array([[1.0, 2.0, 4.0], [2.0, 3.0, 5.0], [4.0, 5.0, 6.0]])
    assert_allclose(pack_lower(m), [1, 2, 3, 4, 5, 6])
    assert_allclose(unpack_lower(pack_lower(m), 3), m)


def test_summary_frame_sorted():
    frame = summary_frame([{"index": 2, "v": 0.1}, {"index": 0, "v": 0.3}, {"index": 1, "v": 0.2}])
    assert frame["index"].tolist() == [0, 1, 2]
    assert frame["v"].tolist() == [0.3, 0.2, 0.1]


def test_preset_specs_serialise(any_preset):
    spec, lspec = any_preset
    assert spec_from_dict(json.loads(dumps_spec(spec, lspec))) == (spec, lspec)


def test_build_presets_script(tmp_path):
    paths = build(tmp_path)
    assert len(paths) == 10
    line = summarize(tmp_path / "lwy_lower2.json")
    assert "quotient_dim=8" in line and line.endswith("ok")
    assert "INVALID" in summarize(tmp_path / "missing.json")
