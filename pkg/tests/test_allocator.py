"""Tests for the exact allocator, the exhaustive oracle and assignment scoring."""

import itertools

import numpy as np
import pytest

from owc_alloc.allocation.solver import (
    bruteforce_size,
    check_assignment,
    evaluate_assignment,
    solve_bruteforce,
    solve_exact,
)
from owc_alloc.config import ObjectiveMode
from owc_alloc.errors import FeasibilityError, InfeasibleAllocationError, InstanceTooLargeError
from owc_alloc.models.allocation import Assignment
from owc_alloc.models.wavelength import Wavelength
from owc_alloc.scenarios.catalog import wdma_toy_expected, wdma_toy_problem

RED = Wavelength.RED
BLUE = Wavelength.BLUE


def test_toy_instance_moves_user_one_to_blue():
    assignment = solve_exact(wdma_toy_problem())

    assert assignment.users == wdma_toy_expected().users
    assert assignment.objective is ObjectiveMode.SUM_LINEAR


def test_toy_instance_agrees_with_bruteforce():
    problem = wdma_toy_problem()

    exact = solve_exact(problem)
    oracle = solve_bruteforce(problem)

    assert exact.users == oracle.users
    assert exact.objective_value == oracle.objective_value


def test_single_user_takes_best_interference_free_link(make_problem):
    gains = np.array([[[2e-7, 1e-6], [5e-7, 3e-7]]])
    problem = make_problem(gains, wavelengths=(RED, BLUE))

    assignment = solve_exact(problem)

    scores = {}
    for ap, wavelength, branch in itertools.product((1, 2), (RED, BLUE), (1, 2)):
        candidate = Assignment.from_triples([(ap, wavelength, branch)])
        scores[(ap, wavelength, branch)] = evaluate_assignment(candidate, problem).objective_linear
    best = max(scores, key=scores.get)
    assert assignment.users[0].key() == (best[0], best[1].index, best[2])
    # red carries more power at a higher responsivity
    assert assignment.users[0].wavelength is RED
    assert assignment.users[0].ap_id == 2


def test_single_access_point_forces_distinct_wavelengths(make_problem):
    gains = np.array([[[1e-6]], [[8e-7]]])
    problem = make_problem(gains, wavelengths=(RED, BLUE))

    assignment = solve_bruteforce(problem)

    assert {user.wavelength for user in assignment.users} == {RED, BLUE}
    assert {user.ap_id for user in assignment.users} == {1}


def test_more_users_than_slots_is_infeasible(make_problem):
    gains = np.full((3, 1, 1), 1e-6)
    problem = make_problem(gains, wavelengths=(RED, BLUE))

    with pytest.raises(InfeasibleAllocationError, match="3 users exceed 2"):
        solve_exact(problem)
    with pytest.raises(InfeasibleAllocationError):
        solve_bruteforce(problem)


def test_no_users_gives_empty_assignment(make_problem):
    problem = make_problem(np.zeros((0, 4, 2)))

    assignment = solve_exact(problem)

    assert assignment.users == ()
    assert assignment.objective_value == 0.0


def test_bruteforce_refuses_large_instances(make_problem):
    problem = make_problem(np.full((3, 2, 2), 1e-6))

    assert bruteforce_size(problem) == 8**3
    with pytest.raises(InstanceTooLargeError) as excinfo:
        solve_bruteforce(problem, limit=100)
    assert excinfo.value.estimate == 512
    assert excinfo.value.limit == 100


def test_exact_matches_bruteforce_on_random_instance(make_problem):
    rng = np.random.default_rng(7)
    gains = rng.uniform(1e-7, 1e-5, size=(4, 2, 2))
    problem = make_problem(gains, wavelengths=(RED, BLUE))

    exact = solve_exact(problem)
    oracle = solve_bruteforce(problem)

    assert exact.users == oracle.users
    assert exact.objective_value == pytest.approx(oracle.objective_value, rel=1e-12)


def test_exact_objective_matches_evaluation(make_problem):
    rng = np.random.default_rng(11)
    problem = make_problem(rng.uniform(1e-7, 1e-5, size=(3, 4, 3)))

    assignment = solve_exact(problem)
    report = evaluate_assignment(assignment, problem)

    assert assignment.objective_value == report.objective_linear


def test_db_objective_mode(make_problem):
    rng = np.random.default_rng(3)
    problem = make_problem(rng.uniform(1e-7, 1e-5, size=(3, 2, 2)), objective=ObjectiveMode.SUM_DB)

    exact = solve_exact(problem)
    oracle = solve_bruteforce(problem)

    assert exact.objective is ObjectiveMode.SUM_DB
    assert exact.users == oracle.users
    assert exact.objective_value == evaluate_assignment(exact, problem).objective_db


def test_exact_dominates_every_feasible_assignment(make_problem):
    rng = np.random.default_rng(5)
    problem = make_problem(rng.uniform(1e-7, 1e-5, size=(2, 2, 2)))
    best = solve_exact(problem).objective_value

    triples = list(itertools.product((1, 2), (RED, BLUE), (1, 2)))
    for first, second in itertools.product(triples, repeat=2):
        if first[:2] == second[:2]:
            continue
        candidate = Assignment.from_triples([first, second])
        assert evaluate_assignment(candidate, problem).objective_linear <= best


def test_distinct_wavelengths_see_no_interference(make_problem):
    gains = np.array([[[1e-6, 4e-7]], [[4e-7, 1e-6]]])
    problem = make_problem(gains)
    alone = make_problem(gains[:1])

    report = evaluate_assignment(Assignment.from_triples([(1, RED, 1), (2, BLUE, 1)]), problem)
    single = evaluate_assignment(Assignment.from_triples([(1, RED, 1)]), alone)

    assert report.users[0].sinr_linear == single.users[0].sinr_linear
    assert report.users[0].interference_powers_w == {}


def test_swapping_users_of_symmetric_instance_keeps_objective(make_problem):
    """Both users hear the access points identically, so exchanging their triples is a relabel."""
    gains = np.array([[[1e-6, 4e-7]], [[1e-6, 4e-7]]])
    problem = make_problem(gains)

    straight = evaluate_assignment(Assignment.from_triples([(1, RED, 1), (2, RED, 1)]), problem)
    swapped = evaluate_assignment(Assignment.from_triples([(2, RED, 1), (1, RED, 1)]), problem)

    assert straight.objective_linear == pytest.approx(swapped.objective_linear, rel=1e-12)


@pytest.mark.parametrize(
    "triples,message",
    [
        ([(1, RED, 1)], "assignment has 1 users"),
        ([(1, RED, 1), (9, RED, 1)], "user 2: unknown access point 9"),
        ([(1, RED, 1), (2, Wavelength.GREEN, 1)], "wavelength Green is not in the problem"),
        ([(1, RED, 3), (2, RED, 1)], "user 1: branch 3 outside 1..2"),
        ([(2, BLUE, 1), (2, BLUE, 2)], "users 1 and 2 share AP 2 wavelength Blue"),
    ],
)
def test_check_assignment_names_the_violation(make_problem, triples, message):
    problem = make_problem(np.full((2, 2, 2), 1e-6))

    with pytest.raises(FeasibilityError, match=message):
        check_assignment(Assignment.from_triples(triples), problem)


def test_solver_is_deterministic(make_problem):
    """Equal-gain users tie; the smallest (AP, wavelength, branch) vector wins."""
    problem = make_problem(np.full((2, 2, 2), 1e-6))

    first = solve_exact(problem)
    second = solve_exact(problem)

    assert first.users == second.users
    assert first.users == solve_bruteforce(problem).users
    check_assignment(first, problem)
