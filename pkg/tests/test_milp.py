"""Tests for the CPLEX LP export."""

import numpy as np
import pytest

from owc_alloc.allocation.milp import LinearProgram, build_milp, export_milp, write_milp
from owc_alloc.models.wavelength import Wavelength
from owc_alloc.scenarios.catalog import wdma_toy_problem

RED = Wavelength.RED


def _sections(text):
    return [line for line in text.splitlines() if line and not line.startswith((" ", "\\"))]


def test_single_link_model(make_problem):
    lp = build_milp(make_problem(np.array([[[1e-6]]]), wavelengths=(RED,)))

    assert list(lp.binary) == ["x_u1_a1_Red_b1"]
    assert list(lp.constraints) == ["assign_u1", "slot_a1_Red"]
    assert lp.constraints["assign_u1"][1:] == ("=", 1)
    assert lp.constraints["slot_a1_Red"][1:] == ("<=", 1)


def test_text_layout():
    text = export_milp(wdma_toy_problem())

    assert text.startswith("\\ WDMA resource allocation, CPLEX LP format.\n")
    assert "\\ users=3 aps=3 wavelengths=2 branches=1\n" in text
    assert _sections(text) == ["Maximize", "Subject To", "Binary", "End"]
    assert " sinr_surrogate: " in text
    assert text.endswith("End\n")


def test_toy_model_sizes():
    lp = build_milp(wdma_toy_problem())

    x_vars = [name for name in lp.binary if name.startswith("x_")]
    z_vars = [name for name in lp.binary if name.startswith("z_")]
    assert len(x_vars) == 3 * 3 * 2
    # every cross gain is non-zero: 3 user pairs, 2 wavelengths, 6 ordered AP pairs
    assert len(z_vars) == 3 * 2 * 6
    assert len(lp.constraints) == 3 + 3 * 2 + 3 * len(z_vars)
    assert "x_u1_a1_Blue_b1" in x_vars
    assert "z_u2_v3_a2_a3_Red" in z_vars


def test_pair_variables_only_for_interfering_links(make_problem):
    """User 1 only hears AP 1 and user 2 only AP 2."""
    gains = np.array([[[1e-6, 0.0]], [[0.0, 1e-6]]])
    lp = build_milp(make_problem(gains, wavelengths=(RED,)))

    z_vars = [name for name in lp.binary if name.startswith("z_")]
    assert z_vars == ["z_u1_v2_a2_a1_Red"]
    terms, sense, rhs = lp.constraints["zlo_u1_v2_a2_a1_Red"]
    assert (sense, rhs) == (">=", -1)
    assert (1.0, "z_u1_v2_a2_a1_Red") in terms
    assert lp.constraints["zu_u1_v2_a2_a1_Red"][1] == "<="
    assert lp.constraints["zv_u1_v2_a2_a1_Red"][1] == "<="
    # the pair variable is penalised in the objective
    coef = dict((name, c) for c, name in lp.objective["sinr_surrogate"])["z_u1_v2_a2_a1_Red"]
    assert coef < 0


def test_objective_skips_dark_links(make_problem):
    gains = np.array([[[1e-6, 0.0]]])
    lp = build_milp(make_problem(gains, wavelengths=(RED,)))

    names = [name for _, name in lp.objective["sinr_surrogate"]]
    assert names == ["x_u1_a1_Red_b1"]


def test_full_room_binary_count(make_problem):
    rng = np.random.default_rng(1)
    problem = make_problem(rng.uniform(1e-7, 1e-5, size=(8, 4, 8)), wavelengths=tuple(Wavelength))

    lp = build_milp(problem)

    assert sum(1 for name in lp.binary if name.startswith("x_")) == 1024


def test_duplicate_constraint_rejected():
    lp = LinearProgram()
    lp.add_constraint("row", [(1.0, "a")], "<=", 1)

    with pytest.raises(ValueError, match="duplicate"):
        lp.add_constraint("row", [(1.0, "b")], "<=", 1)


def test_empty_objective_names_a_variable():
    lp = LinearProgram(objective={"obj": []})
    lp.add_binary("x")

    assert " obj: 0 x\n" in str(lp)


def test_write_milp(tmp_path, make_problem):
    problem = make_problem(np.array([[[1e-6, 2e-7]]]), wavelengths=(RED,))
    path = tmp_path / "nested" / "allocation.lp"

    write_milp(problem, path)

    assert path.read_text(encoding="utf-8") == export_milp(problem)
