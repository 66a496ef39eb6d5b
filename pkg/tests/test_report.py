import json
import math

import numpy as np
import pytest

from fraxol.report import canonical, csv_text, emit_report, format_value, json_text, node_header, node_rows, round_sig


def test_round_sig():
    assert round_sig(math.pi) == 3.14159265359
    assert round_sig(1 / 3 * 1e-20) == 3.33333333333e-21


def test_canonical_handles_numpy_and_nonfinite():
    obj = {"a": np.float64(0.1 + 0.2), "b": np.array([1, 2]), "c": (np.bool_(True), math.inf), "d": np.int64(3)}
    assert canonical(obj) == {"a": 0.3, "b": [1, 2], "c": [True, None], "d": 3}


def test_json_keeps_key_order():
    text = json_text({"z": 1.0, "a": 2.0})
    assert list(json.loads(text)) == ["z", "a"] and text.endswith("\n")


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(np.int32(7)) == "7"
    assert format_value(2.0 / 3.0) == "0.666666666667"
    assert format_value(math.nan) == "nan"
    assert format_value("x") == "x"


def test_csv_text():
    assert csv_text(["a", "b"], [[1, 0.5], ["q", False]]) == "a,b\n1,0.5\nq,false\n"


def test_emit_report_round_trip(tmp_path):
    p = emit_report({"x": [1.0, 2.0]}, "json", tmp_path / "sub" / "r.json")
    assert json.loads(p.read_text()) == {"x": [1.0, 2.0]}
    p2 = emit_report([[1, 2.0]], "csv", tmp_path / "r.csv", header=["i", "v"])
    assert p2.read_text() == "i,v\n1,2\n"
    with pytest.raises(ValueError):
        emit_report([], "csv", tmp_path / "x.csv")
    with pytest.raises(ValueError):
        emit_report({}, "xml", tmp_path / "x.xml")


def test_emit_report_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="cannot write"):
        emit_report({}, "json", blocker / "r.json")


def test_node_rows():
    nodes = np.array([[0.0, 0.0], [0.5, 0.25]])
    assert node_header(2, ["u"]) == ["index", "x1", "x2", "u"]
    assert node_rows(nodes, np.array([1.0, 2.0])) == [[0, 0.0, 0.0, 1.0], [1, 0.5, 0.25, 2.0]]
