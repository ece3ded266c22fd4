"""Exact joint assignment of (access point, wavelength, branch) to users.

Search runs over (access point, wavelength) slots only. A user's branch changes
nothing but that user's own SINR, so once every slot is fixed each user simply
takes its best branch (the lowest id among equals).
"""

import itertools
import math
import time
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import structlog
from scipy.optimize import linear_sum_assignment

from owc_alloc.config import ObjectiveMode
from owc_alloc.errors import FeasibilityError, InfeasibleAllocationError, InstanceTooLargeError
from owc_alloc.models.allocation import AllocationProblem, Assignment, UserAssignment
from owc_alloc.models.metrics import SinrReport, to_db
from owc_alloc.models.wavelength import Wavelength
from owc_alloc.optics.metrics import (
    PowerLookup,
    build_report,
    received_total,
    sinr_from_currents,
)
from owc_alloc.optics.receiver import noise_variance

logger = structlog.get_logger(__name__)

BRUTEFORCE_LIMIT = 10**8

# relative slack on pruning so bounds that tie the incumbent are still explored
_PRUNE_SLACK = 1e-9

# (ap index, wavelength index)
Slot = Tuple[int, int]


def power_lookup(problem: AllocationProblem) -> PowerLookup:
    """Transmit power by (ap_id, wavelength); wavelengths outside the problem are dark."""
    ap_pos = {ap_id: i for i, ap_id in enumerate(problem.ap_ids)}
    w_pos = {w: j for j, w in enumerate(problem.wavelengths)}
    table = problem.tx_power.tolist()

    def power(ap_id: int, wavelength: Wavelength) -> float:
        j = w_pos.get(wavelength)
        if j is None:
            return 0.0
        return float(table[ap_pos[ap_id]][j])

    return power


def _identity(value: float) -> float:
    return value


class SinrKernel:
    """Assignment-independent photocurrents and noise of an allocation problem.

    ``current[u][b][a][w]`` is the photocurrent user ``u`` sees on branch ``b``
    from access point ``a`` at wavelength ``w``; ``noise_var[u][b][w]`` is the
    noise variance on that branch. Values are computed in the same order as
    :func:`owc_alloc.optics.metrics.link_terms`, so SINRs agree bit for bit.
    """

    def __init__(self, problem: AllocationProblem):
        self.problem = problem
        self.n_users = problem.n_users
        self.n_branches = problem.n_branches
        self.n_aps = problem.n_aps
        self.n_wavelengths = problem.n_wavelengths
        self.score: Callable[[float], float] = (
            to_db if problem.objective == ObjectiveMode.SUM_DB else _identity
        )

        power = power_lookup(problem)
        self.current: List[List[List[List[float]]]] = []
        self.noise_var: List[List[List[float]]] = []
        for u in range(self.n_users):
            user_current = []
            user_noise = []
            for b in range(self.n_branches):
                row = problem.gains[u, b].tolist()
                by_ap = [[0.0] * self.n_wavelengths for _ in range(self.n_aps)]
                by_w = []
                for w, wavelength in enumerate(problem.wavelengths):
                    responsivity = problem.noise.responsivity_of(wavelength)
                    total = received_total(row, problem.ap_ids, power, wavelength)
                    by_w.append(noise_variance(total, problem.noise, wavelength))
                    for a, ap_id in enumerate(problem.ap_ids):
                        by_ap[a][w] = responsivity * (power(ap_id, wavelength) * row[a])
                user_current.append(by_ap)
                user_noise.append(by_w)
            self.current.append(user_current)
            self.noise_var.append(user_noise)

        self.slots: List[Slot] = [
            (a, w) for a in range(self.n_aps) for w in range(self.n_wavelengths)
        ]
        # best score each user could reach on a slot with nobody else transmitting
        self.clean = [
            {slot: self._clean_value(u, slot) for slot in self.slots}
            for u in range(self.n_users)
        ]

    def _clean_value(self, user: int, slot: Slot) -> float:
        a, w = slot
        return max(
            self.score(
                sinr_from_currents(self.current[user][b][a][w], (), self.noise_var[user][b][w])
            )
            for b in range(self.n_branches)
        )

    def best_signal(self, user: int) -> float:
        return max(
            self.current[user][b][a][w]
            for b in range(self.n_branches)
            for a, w in self.slots
        )

    def user_value(self, user: int, branch: int, slots: Sequence[Optional[Slot]]) -> float:
        """Score of ``user`` on ``branch`` against the users placed so far."""
        own = slots[user]
        assert own is not None
        a, w = own
        interferers = []
        for other, slot in enumerate(slots):
            if other == user or slot is None:
                continue
            if slot[1] == w and slot[0] != a:
                interferers.append(self.current[user][branch][slot[0]][w])
        return self.score(
            sinr_from_currents(
                self.current[user][branch][a][w], interferers, self.noise_var[user][branch][w]
            )
        )

    def best_branch(self, user: int, slots: Sequence[Optional[Slot]]) -> Tuple[float, int]:
        best_value = -math.inf
        best = 0
        for b in range(self.n_branches):
            value = self.user_value(user, b, slots)
            if value > best_value:
                best_value, best = value, b
        return best_value, best

    def key(self, slots: Sequence[Slot], branches: Sequence[int]) -> Tuple[int, ...]:
        """Tie-break vector (ap_id, wavelength index, branch_id) per user."""
        problem = self.problem
        result: List[int] = []
        for (a, w), b in zip(slots, branches):
            result.extend((problem.ap_ids[a], problem.wavelengths[w].index, b + 1))
        return tuple(result)

    def to_assignment(
        self, slots: Sequence[Slot], branches: Sequence[int], value: float
    ) -> Assignment:
        problem = self.problem
        users = tuple(
            UserAssignment(problem.ap_ids[a], problem.wavelengths[w], b + 1)
            for (a, w), b in zip(slots, branches)
        )
        return Assignment(users=users, objective_value=value, objective=problem.objective)


def _check_feasible(problem: AllocationProblem) -> None:
    capacity = problem.n_aps * problem.n_wavelengths
    if problem.n_users > capacity:
        raise InfeasibleAllocationError(
            f"{problem.n_users} users exceed {capacity} (access point, wavelength) slots "
            f"({problem.n_aps} APs x {problem.n_wavelengths} wavelengths)"
        )


class _Incumbent:
    """Best leaf so far under the (objective, smallest key) order."""

    def __init__(self) -> None:
        self.value = -math.inf
        self.key: Optional[Tuple[int, ...]] = None
        self.slots: List[Slot] = []
        self.branches: List[int] = []

    def offer(
        self, value: float, key: Tuple[int, ...], slots: Sequence[Slot], branches: Sequence[int]
    ) -> None:
        if self.key is None or value > self.value or (value == self.value and key < self.key):
            self.value = value
            self.key = key
            self.slots = list(slots)
            self.branches = list(branches)


class _BranchAndBound:
    """Depth-first search over users, strongest first.

    The bound at a node adds, for placed users, their best branch score with
    only placed interferers and, for the rest, an optimal matching of users to
    free slots on interference-free scores. Interference only lowers SINR and
    every remaining user needs its own slot, so the bound never underestimates.
    """

    def __init__(self, kernel: SinrKernel):
        self.kernel = kernel
        n_users = kernel.n_users
        self.order = sorted(range(n_users), key=lambda u: (-kernel.best_signal(u), u))
        self.candidates = [
            sorted(kernel.slots, key=lambda slot, u=u: (-kernel.clean[u][slot], slot))
            for u in range(n_users)
        ]
        self.incumbent = _Incumbent()
        self.nodes = 0
        self.pruned = 0

    def run(self) -> _Incumbent:
        self._descend(0, [None] * self.kernel.n_users, set())
        return self.incumbent

    def _bound(self, depth: int, slots: List[Optional[Slot]], used: Set[Slot]) -> float:
        kernel = self.kernel
        total = 0.0
        for user in self.order[:depth]:
            total += kernel.best_branch(user, slots)[0]
        rest = self.order[depth:]
        if rest:
            free = [slot for slot in kernel.slots if slot not in used]
            matrix = np.array([[kernel.clean[user][slot] for slot in free] for user in rest])
            rows, cols = linear_sum_assignment(matrix, maximize=True)
            total += float(matrix[rows, cols].sum())
        return total

    def _descend(self, depth: int, slots: List[Optional[Slot]], used: Set[Slot]) -> None:
        self.nodes += 1
        kernel = self.kernel
        if depth == kernel.n_users:
            self._leaf(slots)
            return
        incumbent = self.incumbent
        if incumbent.key is not None:
            slack = _PRUNE_SLACK * max(1.0, abs(incumbent.value))
            if self._bound(depth, slots, used) + slack < incumbent.value:
                self.pruned += 1
                return
        user = self.order[depth]
        for slot in self.candidates[user]:
            if slot in used:
                continue
            slots[user] = slot
            used.add(slot)
            self._descend(depth + 1, slots, used)
            used.discard(slot)
            slots[user] = None

    def _leaf(self, slots: List[Optional[Slot]]) -> None:
        kernel = self.kernel
        placed = [slot for slot in slots if slot is not None]
        scored = [kernel.best_branch(user, slots) for user in range(kernel.n_users)]
        value = sum(score for score, _ in scored)
        branches = [b for _, b in scored]
        self.incumbent.offer(value, kernel.key(placed, branches), placed, branches)


def solve_exact(problem: AllocationProblem) -> Assignment:
    """Optimal assignment under the problem's objective.

    Among equal objective values the lexicographically smallest
    (ap_id, wavelength index, branch_id) vector wins.

    Raises:
        InfeasibleAllocationError: more users than (access point, wavelength) slots
    """
    _check_feasible(problem)
    if problem.n_users == 0:
        return Assignment(users=(), objective_value=0.0, objective=problem.objective)

    started = time.perf_counter()
    kernel = SinrKernel(problem)
    search = _BranchAndBound(kernel)
    best = search.run()
    assignment = kernel.to_assignment(best.slots, best.branches, best.value)
    logger.info(
        "exact_allocation_completed",
        users=problem.n_users,
        aps=problem.n_aps,
        wavelengths=problem.n_wavelengths,
        objective=problem.objective.value,
        objective_value=best.value,
        nodes=search.nodes,
        pruned=search.pruned,
        elapsed_s=round(time.perf_counter() - started, 3),
    )
    return assignment


def bruteforce_size(problem: AllocationProblem) -> int:
    """Joint assignments an exhaustive search enumerates."""
    return (problem.n_aps * problem.n_wavelengths * problem.n_branches) ** problem.n_users


def solve_bruteforce(problem: AllocationProblem, limit: int = BRUTEFORCE_LIMIT) -> Assignment:
    """Enumerate every joint assignment; same objective and tie-break as :func:`solve_exact`.

    Raises:
        InstanceTooLargeError: the enumeration would exceed ``limit`` assignments
        InfeasibleAllocationError: more users than (access point, wavelength) slots
    """
    estimate = bruteforce_size(problem)
    if estimate > limit:
        raise InstanceTooLargeError(estimate, limit)
    _check_feasible(problem)
    if problem.n_users == 0:
        return Assignment(users=(), objective_value=0.0, objective=problem.objective)

    kernel = SinrKernel(problem)
    triples = sorted(
        itertools.product(
            range(problem.n_aps), range(problem.n_wavelengths), range(problem.n_branches)
        )
    )
    best = _Incumbent()
    visited = 0
    for combo in itertools.product(triples, repeat=problem.n_users):
        slots: List[Slot] = [(a, w) for a, w, _ in combo]
        if len(set(slots)) < len(slots):
            continue
        visited += 1
        branches = [b for _, _, b in combo]
        value = sum(
            kernel.user_value(user, branches[user], slots) for user in range(problem.n_users)
        )
        best.offer(value, kernel.key(slots, branches), slots, branches)

    logger.info(
        "bruteforce_allocation_completed",
        users=problem.n_users,
        feasible_assignments=visited,
        objective_value=best.value,
    )
    return kernel.to_assignment(best.slots, best.branches, best.value)


def check_assignment(assignment: Assignment, problem: AllocationProblem) -> None:
    """Raise :class:`FeasibilityError` naming the offending user or pair."""
    if len(assignment) != problem.n_users:
        raise FeasibilityError(
            f"assignment has {len(assignment)} users, problem has {problem.n_users}"
        )
    taken: Dict[Tuple[int, Wavelength], int] = {}
    for user, triple in enumerate(assignment.users, start=1):
        if triple.ap_id not in problem.ap_ids:
            raise FeasibilityError(f"user {user}: unknown access point {triple.ap_id}")
        if triple.wavelength not in problem.wavelengths:
            raise FeasibilityError(
                f"user {user}: wavelength {triple.wavelength.label} is not in the problem"
            )
        if not 1 <= triple.branch_id <= problem.n_branches:
            raise FeasibilityError(
                f"user {user}: branch {triple.branch_id} outside 1..{problem.n_branches}"
            )
        pair = (triple.ap_id, triple.wavelength)
        if pair in taken:
            raise FeasibilityError(
                f"users {taken[pair]} and {user} share AP {triple.ap_id} "
                f"wavelength {triple.wavelength.label}"
            )
        taken[pair] = user


def evaluate_assignment(assignment: Assignment, problem: AllocationProblem) -> SinrReport:
    """Per-user SINRs and both objective values of a given assignment.

    Raises:
        FeasibilityError: the assignment breaks a constraint
    """
    check_assignment(assignment, problem)
    return build_report(
        assignment, problem.gains, problem.ap_ids, power_lookup(problem), problem.noise
    )
