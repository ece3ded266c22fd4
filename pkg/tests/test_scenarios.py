"""Tests for the scenario catalog and scenario documents."""

import json

import pytest
import yaml

from owc_alloc.config import LdLayout
from owc_alloc.errors import ConfigError
from owc_alloc.models.channel import LD_GRID_PITCH_M
from owc_alloc.models.geometry import Vec3
from owc_alloc.models.wavelength import Wavelength
from owc_alloc.scenarios.catalog import (
    SCENARIO_IDS,
    all_builtins,
    builtin,
    reference_assignment,
)
from owc_alloc.scenarios.loader import dump_config, load_config, validate_document
from owc_alloc.scenarios.schema import ScenarioSpec, json_schema


def test_builtin_first_scenario():
    spec = builtin(1, 1)

    assert spec.name == "scenario1-system1"
    assert spec.users[0].to_vec() == Vec3(0.5, 6.5, 1.0)
    first = spec.reference().users[0]
    assert (first.ap_id, first.branch_id, first.wavelength) == (4, 1, Wavelength.RED)


def test_builtin_second_scenario_system_three():
    first = builtin(2, 3).reference().users[0]

    assert (first.ap_id, first.branch_id, first.wavelength) == (1, 4, Wavelength.YELLOW)


def test_builtin_system_two_changes_branch():
    second = reference_assignment(1, 2).users[1]

    assert (second.ap_id, second.branch_id, second.wavelength) == (4, 4, Wavelength.YELLOW)


def test_all_builtins_cover_every_pair():
    specs = all_builtins()

    assert len(specs) == 6
    assert sum(len(spec.users) for spec in specs) == 48
    assert {spec.scenario_id for spec in specs} == set(SCENARIO_IDS)
    for spec in specs:
        assert len(spec.reference_assignment) == 8
        assert len(spec.to_receivers()) == 8
        assert len(spec.to_access_points()) == 8


@pytest.mark.parametrize("scenario,system", [(3, 1), (1, 4), (0, 0)])
def test_builtin_rejects_unknown_ids(scenario, system):
    with pytest.raises(ConfigError):
        builtin(scenario, system)


def test_builtin_receivers_follow_system_offset():
    receivers = builtin(1, 2).to_receivers()

    assert [branch.azimuth_deg for branch in receivers[0].branches] == [30.0, 120.0, 210.0, 300.0]


def test_minimal_document_takes_defaults(tmp_path):
    path = tmp_path / "room.json"
    path.write_text(json.dumps({"users": [{"x_m": 1.0, "y_m": 2.0, "z_m": 1.0}]}))

    spec = load_config(path)

    assert spec.name == "custom"
    assert spec.room.width_m == 4.0
    assert len(spec.transmitters.access_points) == 8
    assert spec.wavelength_set() == tuple(Wavelength)
    assert spec.to_noise().responsivity_of(Wavelength.RED) == 0.4
    assert spec.to_access_points()[0].power(Wavelength.RED) == pytest.approx(9.6)
    assert spec.reference() is None


def test_user_above_ceiling_is_rejected_with_path():
    document = {"users": [{"x_m": 1.0, "y_m": 2.0, "z_m": 5.0}]}

    with pytest.raises(ConfigError) as excinfo:
        validate_document(document)

    assert [path for path, _ in excinfo.value.problems] == ["users.0.z_m"]
    assert "users.0.z_m" in str(excinfo.value)


def test_branch_below_horizon_is_rejected_with_path():
    document = {
        "users": [{"x_m": 1.0, "y_m": 2.0, "z_m": 1.0}],
        "receiver": {"elevation_deg": -10.0},
    }

    with pytest.raises(ConfigError) as excinfo:
        validate_document(document)

    assert "receiver.elevation_deg" in {path for path, _ in excinfo.value.problems}


def test_default_units_spread_their_lds_on_a_grid():
    spec = builtin(1, 1)

    ap = spec.to_access_points()[0]

    assert ap.ld_layout is LdLayout.GRID
    assert ap.ld_spacing == LD_GRID_PITCH_M
    assert len(ap.emitters()) == 12


def test_bit_rate_sets_receiver_bandwidth():
    document = {
        "users": [{"x_m": 1.0, "y_m": 2.0, "z_m": 1.0}],
        "receiver": {"bit_rate_bps": 5.7e9, "bandwidth_hz": 1e9},
    }

    noise = validate_document(document).to_noise()

    assert noise.rx_bandwidth == pytest.approx(0.7 * 5.7e9)
    assert noise.responsivity_of(Wavelength.BLUE) == 0.2


def test_schema_violations_are_all_reported():
    document = {
        "users": [{"x_m": 1.0, "y_m": 2.0, "z_m": 1.0}],
        "receiver": {"fov_deg": 120.0},
        "unexpected": True,
    }

    with pytest.raises(ConfigError) as excinfo:
        validate_document(document)

    paths = {path for path, _ in excinfo.value.problems}
    assert {"receiver.fov_deg", "unexpected"} <= paths


def test_reference_rows_must_match_users():
    document = {
        "users": [{"x_m": 1.0, "y_m": 2.0, "z_m": 1.0}],
        "reference_assignment": [
            {"ap_id": 1, "branch_id": 1, "wavelength": "red"},
            {"ap_id": 9, "branch_id": 1, "wavelength": "red"},
        ],
    }

    with pytest.raises(ConfigError) as excinfo:
        validate_document(document)

    paths = [path for path, _ in excinfo.value.problems]
    assert "reference_assignment" in paths
    assert "reference_assignment.1.ap_id" in paths


def test_unknown_wavelength_rejected():
    document = {"users": [{"x_m": 1.0, "y_m": 2.0, "z_m": 1.0}], "wavelengths": ["red", "violet"]}

    with pytest.raises(ConfigError, match="violet"):
        validate_document(document)


def test_non_mapping_document_rejected():
    with pytest.raises(ConfigError):
        validate_document([1, 2, 3])


def test_yaml_document(tmp_path):
    path = tmp_path / "room.yaml"
    path.write_text(
        yaml.safe_dump(
            {
                "name": "two-users",
                "users": [
                    {"x_m": 1.0, "y_m": 2.0, "z_m": 1.0},
                    {"x_m": 3.0, "y_m": 6.0, "z_m": 1.0},
                ],
                "receiver": {"azimuth_offset_deg": 45.0},
            }
        )
    )

    spec = load_config(path)

    assert spec.name == "two-users"
    assert spec.receiver.offset_deg == 45.0
    assert spec.to_receivers()[1].branches[0].azimuth_deg == 45.0


@pytest.mark.parametrize("suffix", [".json", ".yaml"])
def test_dump_and_load_preserve_spec(tmp_path, suffix):
    spec = builtin(2, 2)

    path = dump_config(spec, tmp_path / f"scenario{suffix}")

    assert load_config(path) == spec


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_config("does-not-exist.json")


def test_unparseable_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")

    with pytest.raises(ConfigError, match="cannot parse broken.json"):
        load_config(path)


def test_config_hash_is_stable():
    assert builtin(1, 1).config_hash() == builtin(1, 1).config_hash()
    assert builtin(1, 1).config_hash() != builtin(1, 2).config_hash()
    assert len(builtin(1, 1).config_hash()) == 64


def test_json_schema_lists_top_level_fields():
    schema = json_schema()

    assert set(schema["properties"]) >= {"room", "transmitters", "receiver", "users", "trace"}
    assert "users" in schema["required"]
    assert ScenarioSpec.model_json_schema() == schema
