"""Built-in scenarios and scenario document handling."""

from owc_alloc.scenarios.catalog import (
    REFERENCE_ROWS,
    SCENARIO_IDS,
    SCENARIO_USERS,
    all_builtins,
    builtin,
    reference_assignment,
    wdma_toy_expected,
    wdma_toy_problem,
)
from owc_alloc.scenarios.loader import check_spec, dump_config, load_config, validate_document
from owc_alloc.scenarios.schema import SCHEMA_VERSION, ScenarioSpec, json_schema

__all__ = [
    "REFERENCE_ROWS",
    "SCENARIO_IDS",
    "SCENARIO_USERS",
    "SCHEMA_VERSION",
    "ScenarioSpec",
    "all_builtins",
    "builtin",
    "check_spec",
    "dump_config",
    "json_schema",
    "load_config",
    "reference_assignment",
    "validate_document",
    "wdma_toy_expected",
    "wdma_toy_problem",
]
