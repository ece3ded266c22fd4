"""Built-in scenarios: the reference room, two user layouts and their published allocations.

Scenario 1 puts four users under each of two access points; scenario 2 spreads
eight users over the room. For each layout and each receiver orientation
system (1, 2, 3) the published optimal allocation is stored as
``(ap_id, branch_id, wavelength)`` rows, one per user.
"""

from typing import Dict, List, Tuple

import numpy as np

from owc_alloc.errors import ConfigError
from owc_alloc.models.allocation import AllocationProblem, Assignment
from owc_alloc.models.channel import LD_POWER_W, LDS_PER_UNIT, unit_power
from owc_alloc.models.receiver import NoiseModel
from owc_alloc.models.wavelength import Wavelength
from owc_alloc.optics.receiver import SYSTEM_IDS
from owc_alloc.scenarios.loader import check_spec
from owc_alloc.scenarios.schema import PositionSpec, ReceiverSpec, ReferenceRowSpec, ScenarioSpec

SCENARIO_IDS = (1, 2)

USER_HEIGHT_M = 1.0

SCENARIO_USERS: Dict[int, Tuple[Tuple[float, float], ...]] = {
    1: (
        (0.5, 6.5),
        (0.5, 7.5),
        (1.5, 6.5),
        (1.5, 7.5),
        (2.5, 0.5),
        (2.5, 1.5),
        (3.5, 0.5),
        (3.5, 1.5),
    ),
    2: (
        (0.5, 1.5),
        (0.5, 5.5),
        (0.5, 6.5),
        (1.5, 3.5),
        (2.5, 1.5),
        (2.5, 6.5),
        (3.5, 3.5),
        (3.5, 5.5),
    ),
}

# (scenario, system) -> per-user (ap_id, branch_id, wavelength initial)
REFERENCE_ROWS: Dict[Tuple[int, int], Tuple[Tuple[int, int, str], ...]] = {
    (1, 1): (
        (4, 1, "R"), (4, 3, "Y"), (3, 3, "R"), (8, 4, "R"),
        (1, 2, "R"), (6, 1, "R"), (5, 2, "Y"), (5, 3, "R"),
    ),
    (1, 2): (
        (4, 1, "R"), (4, 4, "Y"), (3, 3, "R"), (8, 4, "R"),
        (1, 2, "R"), (6, 1, "R"), (5, 2, "Y"), (5, 3, "R"),
    ),
    (1, 3): (
        (3, 4, "R"), (4, 4, "Y"), (8, 1, "R"), (4, 3, "R"),
        (5, 1, "R"), (1, 3, "R"), (5, 2, "Y"), (6, 2, "R"),
    ),
    (2, 1): (
        (1, 4, "R"), (3, 3, "Y"), (4, 1, "R"), (2, 3, "R"),
        (5, 4, "R"), (8, 1, "R"), (6, 3, "Y"), (7, 4, "R"),
    ),
    (2, 2): (
        (1, 4, "R"), (3, 4, "Y"), (4, 1, "R"), (2, 3, "R"),
        (5, 4, "R"), (8, 1, "R"), (6, 3, "Y"), (7, 3, "R"),
    ),
    (2, 3): (
        (1, 4, "Y"), (3, 4, "Y"), (4, 1, "Y"), (2, 3, "R"),
        (5, 4, "R"), (8, 1, "R"), (6, 3, "Y"), (7, 3, "R"),
    ),
}  # fmt: skip


def _check_ids(scenario: int, system: int) -> None:
    problems = []
    if scenario not in SCENARIO_IDS:
        problems.append(("scenario", f"must be one of {SCENARIO_IDS}, got {scenario}"))
    if system not in SYSTEM_IDS:
        problems.append(("system", f"must be one of {SYSTEM_IDS}, got {system}"))
    if problems:
        raise ConfigError(problems)


def builtin(scenario: int, system: int) -> ScenarioSpec:
    """The reference room with one user layout and one receiver orientation system.

    Raises:
        ConfigError: unknown scenario or system id
    """
    _check_ids(scenario, system)
    users = [
        PositionSpec(x_m=x, y_m=y, z_m=USER_HEIGHT_M) for x, y in SCENARIO_USERS[scenario]
    ]
    reference = [
        ReferenceRowSpec(ap_id=ap, branch_id=branch, wavelength=Wavelength.parse(w).value)
        for ap, branch, w in REFERENCE_ROWS[(scenario, system)]
    ]
    spec = ScenarioSpec(
        name=f"scenario{scenario}-system{system}",
        scenario_id=scenario,
        receiver=ReceiverSpec(system_id=system),
        users=users,
        reference_assignment=reference,
    )
    return check_spec(spec)


def all_builtins() -> List[ScenarioSpec]:
    return [builtin(scenario, system) for scenario in SCENARIO_IDS for system in SYSTEM_IDS]


def reference_assignment(scenario: int, system: int) -> Assignment:
    _check_ids(scenario, system)
    return Assignment.from_triples(
        [(ap, w, branch) for ap, branch, w in REFERENCE_ROWS[(scenario, system)]]
    )


# three users, three access points, one branch each; user i sits under AP i
_TOY_DIRECT_GAIN = 1e-6
_TOY_NEIGHBOUR_GAIN = 3e-7
_TOY_FAR_GAIN = 1e-9


def wdma_toy_problem() -> AllocationProblem:
    """Three users sharing red and blue over three access points.

    User 1 hears APs 2 and 3 strongly, and users 2 and 3 both hear AP 1. Users
    2 and 3 barely hear each other's AP, so they can share red while user 1 moves
    to blue on AP 1. The optimum is user 1 → (AP 1, Blue), user 2 → (AP 2, Red)
    and user 3 → (AP 3, Red).
    """
    direct, near, far = _TOY_DIRECT_GAIN, _TOY_NEIGHBOUR_GAIN, _TOY_FAR_GAIN
    gains = np.array(
        [
            [[direct, near, near]],
            [[near, direct, far]],
            [[near, far, direct]],
        ]
    )
    wavelengths = (Wavelength.RED, Wavelength.BLUE)
    power = unit_power(LD_POWER_W, LDS_PER_UNIT)
    tx_power = np.array([[power[w] for w in wavelengths] for _ in range(3)])
    return AllocationProblem(
        gains=gains,
        ap_ids=(1, 2, 3),
        tx_power=tx_power,
        wavelengths=wavelengths,
        noise=NoiseModel(),
    )


def wdma_toy_expected() -> Assignment:
    return Assignment.from_triples([(1, "blue", 1), (2, "red", 1), (3, "red", 1)])
