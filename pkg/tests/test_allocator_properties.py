"""Property tests: the exact allocator against exhaustive enumeration.

Instances are built from a hypothesis-chosen shape and seed so gains are
distinct draws from [1e-7, 1e-5].
"""

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from owc_alloc.allocation.solver import (
    check_assignment,
    evaluate_assignment,
    solve_bruteforce,
    solve_exact,
)
from owc_alloc.config import ObjectiveMode
from owc_alloc.models.allocation import AllocationProblem
from owc_alloc.models.channel import LD_POWER_W, LDS_PER_UNIT
from owc_alloc.models.receiver import NoiseModel
from owc_alloc.models.wavelength import ALL_WAVELENGTHS


@st.composite
def allocation_problems(draw, objective=ObjectiveMode.SUM_LINEAR):
    n_aps = draw(st.integers(min_value=1, max_value=3))
    n_wavelengths = draw(st.integers(min_value=1, max_value=2))
    n_branches = draw(st.integers(min_value=1, max_value=2))
    n_users = draw(st.integers(min_value=1, max_value=min(4, n_aps * n_wavelengths)))
    wavelengths = tuple(
        draw(
            st.lists(
                st.sampled_from(ALL_WAVELENGTHS),
                min_size=n_wavelengths,
                max_size=n_wavelengths,
                unique=True,
            )
        )
    )
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    gains = rng.uniform(1e-7, 1e-5, size=(n_users, n_branches, n_aps))
    # dark links exercise the zero-signal path
    if draw(st.booleans()):
        gains[rng.random(gains.shape) < 0.2] = 0.0
    ordered = sorted(wavelengths, key=lambda w: w.index)
    tx_power = np.array(
        [[LDS_PER_UNIT * LD_POWER_W[w] for w in ordered] for _ in range(n_aps)]
    )
    return AllocationProblem(
        gains=gains,
        ap_ids=tuple(range(1, n_aps + 1)),
        tx_power=tx_power,
        wavelengths=tuple(ordered),
        noise=NoiseModel(),
        objective=objective,
    )


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(problem=allocation_problems())
def test_exact_equals_bruteforce(problem):
    exact = solve_exact(problem)
    oracle = solve_bruteforce(problem)

    assert exact.objective_value == oracle.objective_value
    assert exact.users == oracle.users


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(problem=allocation_problems(objective=ObjectiveMode.SUM_DB))
def test_exact_equals_bruteforce_in_db_mode(problem):
    # all-dark users sit on the dB floor and tie everywhere
    assume(np.all(problem.gains.max(axis=(1, 2)) > 0))

    exact = solve_exact(problem)
    oracle = solve_bruteforce(problem)

    assert exact.objective_value == oracle.objective_value
    assert exact.users == oracle.users


@settings(max_examples=100, deadline=None)
@given(problem=allocation_problems())
def test_exact_result_is_feasible_and_scored_consistently(problem):
    assignment = solve_exact(problem)

    check_assignment(assignment, problem)
    report = evaluate_assignment(assignment, problem)
    assert assignment.objective_value == report.objective_linear
    slots = [(user.ap_id, user.wavelength) for user in assignment.users]
    assert len(set(slots)) == len(slots)


@settings(max_examples=50, deadline=None)
@given(problem=allocation_problems())
def test_exact_is_deterministic(problem):
    assert solve_exact(problem).users == solve_exact(problem).users
