"""End-to-end tests of the ``owc-alloc`` command line."""

import json

import pytest

from owc_alloc.cli.main import EXIT_INFEASIBLE, EXIT_INVALID_INPUT, EXIT_IO, exit_code_for, main
from owc_alloc.errors import ConfigError, InfeasibleAllocationError, ReportError
from owc_alloc.export.tables import read_csv
from owc_alloc.pipeline import sweep_offsets

SMALL_ROOM = {
    "name": "small-room",
    "users": [
        {"x_m": 0.5, "y_m": 6.5, "z_m": 1.0},
        {"x_m": 2.5, "y_m": 1.5, "z_m": 1.0},
    ],
    "transmitters": {
        "access_points": [
            {"ap_id": 1, "position": {"x_m": 1.0, "y_m": 7.0, "z_m": 3.0}},
            {"ap_id": 2, "position": {"x_m": 3.0, "y_m": 1.0, "z_m": 3.0}},
        ]
    },
    "wavelengths": ["red", "blue"],
    "trace": {"fine_element_m": 0.5, "coarse_element_m": 1.0},
}


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL_ROOM))
    return path


def _write_config(tmp_path, name, **changes):
    document = dict(SMALL_ROOM, **changes)
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return path


def test_toy_allocation(tmp_path, capsys):
    out = tmp_path / "out"

    assert main(["allocate", "--toy", "wdma", "--output-dir", str(out), "--lp"]) == 0

    run = out / "toy_wdma"
    document = json.loads((run / "assignment.json").read_text())
    assert [row["wavelength"] for row in document["assignment"]] == ["Blue", "Red", "Red"]
    assert document["dominates_reference"] is True
    assert document["concordance"] == 1.0
    manifest = json.loads((run / "manifest.json").read_text())
    assert manifest["command"] == "allocate"
    assert manifest["outputs"] == [
        "allocation.lp",
        "assignment.json",
        "comparison.csv",
        "sinr.csv",
    ]
    assert (run / "allocation.lp").read_text().startswith("\\ WDMA resource allocation")
    printed = capsys.readouterr().out
    assert "Dominance check: PASS" in printed
    assert "Concordance with reference (AP, wavelength): 100%" in printed


def test_toy_allocation_is_reproducible(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"

    assert main(["allocate", "--toy", "wdma", "--output-dir", str(first)]) == 0
    assert main(["allocate", "--toy", "wdma", "--output-dir", str(second)]) == 0

    for name in ("assignment.json", "sinr.csv", "comparison.csv"):
        left = (first / "toy_wdma" / name).read_bytes()
        assert left == (second / "toy_wdma" / name).read_bytes()


def test_toy_allocation_db_objective(tmp_path):
    out = tmp_path / "out"

    assert main(["allocate", "--toy", "wdma", "--objective", "db", "--output-dir", str(out)]) == 0

    document = json.loads((out / "toy_wdma" / "assignment.json").read_text())
    assert document["objective_mode"] == "db"


def test_simulate_is_byte_identical_on_rerun(tmp_path, small_config, capsys):
    first, second = tmp_path / "a", tmp_path / "b"

    assert main(["simulate", "--config", str(small_config), "--output-dir", str(first)]) == 0
    assert main(["simulate", "--config", str(small_config), "--output-dir", str(second)]) == 0

    for name in ("tensor.json", "tensor.csv"):
        left = (first / "small-room" / name).read_bytes()
        assert left == (second / "small-room" / name).read_bytes()
    rows = read_csv(first / "small-room" / "tensor.csv")
    assert len(rows) == 2 * 4 * 2
    assert "Gain tensor 2x4x2 written to" in capsys.readouterr().out


def test_simulate_writes_impulse_responses(tmp_path, small_config):
    out = tmp_path / "out"

    code = main(
        [
            "simulate",
            "--config",
            str(small_config),
            "--orders",
            "los,first",
            "--impulse-responses",
            "--output-dir",
            str(out),
        ]
    )

    assert code == 0
    responses = sorted((out / "small-room" / "ir").glob("*.csv"))
    assert len(responses) == 16
    assert responses[0].name == "user1_branch1_ap1.csv"


def test_allocate_from_saved_tensor(tmp_path, small_config):
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(small_config), "--output-dir", str(out)]) == 0
    tensor = out / "small-room" / "tensor.json"

    code = main(
        [
            "allocate",
            "--config",
            str(small_config),
            "--tensor",
            str(tensor),
            "--output-dir",
            str(tmp_path / "alloc"),
        ]
    )

    assert code == 0
    rows = read_csv(tmp_path / "alloc" / "small-room" / "sinr.csv")
    assert [row["user"] for row in rows] == ["1", "2"]
    slots = {(row["ap_id"], row["wavelength"]) for row in rows}
    assert len(slots) == 2


def test_allocate_rejects_mismatched_tensor(tmp_path, small_config, capsys):
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(small_config), "--output-dir", str(out)]) == 0
    three_users = _write_config(
        tmp_path,
        "three.json",
        users=SMALL_ROOM["users"] + [{"x_m": 2.0, "y_m": 4.0, "z_m": 1.0}],
    )

    code = main(
        [
            "allocate",
            "--config",
            str(three_users),
            "--tensor",
            str(out / "small-room" / "tensor.json"),
            "--output-dir",
            str(out),
        ]
    )

    assert code == EXIT_INVALID_INPUT
    assert "has 2 users, scenario has 3" in capsys.readouterr().err


def test_allocate_infeasible_instance(tmp_path, capsys):
    crowded = _write_config(
        tmp_path,
        "crowded.json",
        users=SMALL_ROOM["users"] + [{"x_m": 2.0, "y_m": 4.0, "z_m": 1.0}],
        wavelengths=["red"],
        trace={"fine_element_m": 0.5, "coarse_element_m": 1.0, "orders": ["los"]},
    )

    code = main(["allocate", "--config", str(crowded), "--output-dir", str(tmp_path / "out")])

    assert code == EXIT_INFEASIBLE
    assert "3 users exceed 2" in capsys.readouterr().err


def test_allocate_needs_a_scenario(tmp_path):
    assert main(["allocate", "--output-dir", str(tmp_path)]) == EXIT_INVALID_INPUT


def test_missing_config_file_is_an_io_error(tmp_path):
    code = main(["simulate", "--config", str(tmp_path / "absent.json")])

    assert code == EXIT_IO


def test_invalid_thread_count(tmp_path):
    assert main(["allocate", "--toy", "wdma", "--threads", "0"]) == EXIT_INVALID_INPUT


def test_report_after_allocation(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["allocate", "--toy", "wdma", "--output-dir", str(out)]) == 0

    assert main(["report", "--results-dir", str(out)]) == 0

    report = out / "report"
    summary = read_csv(report / "sinr_summary.csv")
    assert len(summary) == 3
    thresholds = read_csv(report / "threshold.csv")
    assert thresholds[0]["run"] == "toy_wdma"
    assert thresholds[0]["users"] == "3"
    assert (report / "sinr_toy_wdma.svg").exists()
    assert (report / "bandwidth_toy_wdma.svg").exists()
    assert "users at or above 15.6 dB" in capsys.readouterr().out


def test_report_on_missing_directory_writes_nothing(tmp_path):
    results = tmp_path / "nothing-here"

    assert main(["report", "--results-dir", str(results)]) == EXIT_IO
    assert not results.exists()


def test_report_on_empty_directory_writes_nothing(tmp_path):
    results = tmp_path / "empty"
    results.mkdir()

    assert main(["report", "--results-dir", str(results)]) == EXIT_IO
    assert list(results.iterdir()) == []


def test_sweep_rejects_non_positive_step(tmp_path):
    code = main(
        ["sweep-orientation", "--scenario", "1", "--step", "0", "--output-dir", str(tmp_path)]
    )

    assert code == EXIT_INVALID_INPUT


def test_sweep_orientation(tmp_path, small_config):
    out = tmp_path / "out"

    code = main(
        [
            "sweep-orientation",
            "--config",
            str(small_config),
            "--orders",
            "los",
            "--step",
            "45",
            "--output-dir",
            str(out),
        ]
    )

    assert code == 0
    rows = read_csv(out / "small-room_sweep" / "sweep.csv")
    assert [row["azimuth_offset_deg"] for row in rows] == ["0", "45"]
    per_user = read_csv(out / "small-room_sweep" / "sweep_users.csv")
    assert len(per_user) == 4


def test_schema_printed(capsys):
    assert main(["schema"]) == 0

    schema = json.loads(capsys.readouterr().out)
    assert "users" in schema["properties"]


def test_schema_written(tmp_path):
    path = tmp_path / "schema" / "scenario.json"

    assert main(["schema", "--output", str(path)]) == 0

    assert json.loads(path.read_text())["title"] == "ScenarioSpec"


def test_sweep_offsets_count():
    assert len(sweep_offsets(0.0, 90.0, 5.0)) == 18
    assert sweep_offsets(0.0, 90.0, 30.0) == [0.0, 30.0, 60.0]
    assert sweep_offsets(10.0, 10.0, 5.0) == []


@pytest.mark.parametrize(
    "exc,code",
    [
        (InfeasibleAllocationError("full"), EXIT_INFEASIBLE),
        (ReportError("missing"), EXIT_IO),
        (FileNotFoundError("absent"), EXIT_IO),
        (ConfigError([("users", "empty")]), EXIT_INVALID_INPUT),
        (ValueError("bad"), EXIT_INVALID_INPUT),
        (RuntimeError("bug"), None),
    ],
)
def test_exit_code_mapping(exc, code):
    assert exit_code_for(exc) == code
