"""Tests for CSV/JSON writers and charts."""

import json
import math

import numpy as np
import pytest

from owc_alloc.errors import ReportError
from owc_alloc.export.charts import grouped_bar_chart
from owc_alloc.export.tables import (
    SINR_COLUMNS,
    TENSOR_COLUMNS,
    format_value,
    read_csv,
    read_tensor_json,
    write_csv,
    write_json,
    write_sinr_csv,
    write_tensor_csv,
    write_tensor_json,
)
from owc_alloc.models.allocation import Assignment
from owc_alloc.models.channel import AccessPoint, GainTensor
from owc_alloc.models.geometry import Vec3
from owc_alloc.models.receiver import NoiseModel
from owc_alloc.optics.metrics import sinr_report


def _tensor():
    gains = np.array([[[1e-6, 2e-7], [0.0, 3e-7]]])
    return GainTensor(
        dc_gain=gains,
        ap_ids=(1, 2),
        bandwidth_hz=np.array([[[5e9, 4.2e9], [np.nan, 6e9]]]),
        bandwidth_lower_bound=np.array([[[True, False], [False, False]]]),
        order_dc_gain={"los": gains * 0.9, "first": gains * 0.1},
    )


@pytest.mark.parametrize(
    "value,text",
    [
        (None, ""),
        (float("nan"), ""),
        (True, "true"),
        (False, "false"),
        (1.0 / 3.0, "0.3333333333"),
        (np.float64(2.5e-7), "2.5e-07"),
        (7, "7"),
        ("Red", "Red"),
    ],
)
def test_format_value(value, text):
    assert format_value(value) == text


def test_write_csv_keeps_column_order(tmp_path):
    path = write_csv(tmp_path / "out" / "t.csv", ("b", "a"), [{"a": 1, "b": 2.0, "c": 3}])

    assert path.read_text(encoding="utf-8") == "b,a\n2,1\n"
    assert read_csv(path) == [{"b": "2", "a": "1"}]


def test_write_json_sorted_and_nan_free(tmp_path):
    path = write_json(
        tmp_path / "doc.json", {"z": np.float64(1.5), "a": [float("nan"), np.int64(3)]}
    )

    text = path.read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"z"')
    assert json.loads(text) == {"a": [None, 3], "z": 1.5}
    assert text.endswith("\n")


def test_tensor_json_round_trip(tmp_path):
    tensor = _tensor()
    path = write_tensor_json(tmp_path / "tensor.json", tensor, [Vec3(0.5, 6.5, 1.0)])

    loaded = read_tensor_json(path)

    assert loaded.ap_ids == (1, 2)
    np.testing.assert_array_equal(loaded.dc_gain, tensor.dc_gain)
    np.testing.assert_array_equal(loaded.bandwidth_hz, tensor.bandwidth_hz)
    np.testing.assert_array_equal(loaded.bandwidth_lower_bound, tensor.bandwidth_lower_bound)
    assert set(loaded.order_dc_gain) == {"los", "first"}
    assert json.loads(path.read_text())["user_positions_m"] == [[0.5, 6.5, 1.0]]


def test_read_tensor_json_missing_file(tmp_path):
    with pytest.raises(ReportError, match="does not exist"):
        read_tensor_json(tmp_path / "absent.json")


def test_read_tensor_json_rejects_other_documents(tmp_path):
    path = tmp_path / "other.json"
    path.write_text('{"ap_ids": [1]}')

    with pytest.raises(ReportError, match="not a gain tensor"):
        read_tensor_json(path)


def test_tensor_csv(tmp_path):
    path = write_tensor_csv(tmp_path / "tensor.csv", _tensor())

    rows = read_csv(path)
    assert tuple(rows[0]) == TENSOR_COLUMNS
    assert len(rows) == 4
    assert rows[0]["dc_gain"] == "1e-06"
    assert rows[0]["bandwidth_lower_bound"] == "true"
    assert rows[2]["bandwidth_hz"] == ""
    assert rows[0]["second_gain"] == ""


def test_sinr_csv(tmp_path):
    tensor = _tensor()
    aps = [
        AccessPoint(ap_id=1, position=Vec3(1.0, 1.0, 3.0)),
        AccessPoint(ap_id=2, position=Vec3(1.0, 3.0, 3.0)),
    ]
    report = sinr_report(Assignment.from_triples([(1, "red", 1)]), tensor, aps, NoiseModel())

    rows = read_csv(write_sinr_csv(tmp_path / "sinr.csv", report, scenario=1, system=2))

    assert tuple(rows[0]) == SINR_COLUMNS
    row = rows[0]
    assert (row["scenario"], row["system"], row["user"]) == ("1", "2", "1")
    assert (row["ap_id"], row["wavelength"], row["branch_id"]) == ("1", "Red", "1")
    assert row["channel_bandwidth_hz"] == "5000000000"
    assert row["bandwidth_lower_bound"] == "true"
    assert row["interference_power_w"] == "0"
    assert row["passes_threshold"] == ("true" if report.users[0].sinr_db >= 15.6 else "false")
    assert math.isclose(float(row["sinr_db"]), report.users[0].sinr_db, rel_tol=1e-9)


def test_chart_is_deterministic(tmp_path):
    groups = {"System 1": [20.0, 18.5, 12.0], "System 2": [19.0, 17.0, 16.5]}

    first = grouped_bar_chart(
        tmp_path / "a.svg", groups, title="SINR", ylabel="dB", threshold=15.6, threshold_label="BER"
    )
    second = grouped_bar_chart(
        tmp_path / "b.svg", groups, title="SINR", ylabel="dB", threshold=15.6, threshold_label="BER"
    )

    assert first.read_bytes() == second.read_bytes()
    assert b"<svg" in first.read_bytes()
