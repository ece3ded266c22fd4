"""Scenario → gain tensor → allocation → report.

The command line and the reproduction script both drive runs through these
functions; nothing here writes files.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import structlog

from owc_alloc.allocation.solver import check_assignment, power_lookup, solve_exact
from owc_alloc.config import ObjectiveMode, Settings
from owc_alloc.models.allocation import AllocationProblem, Assignment
from owc_alloc.models.channel import AccessPoint, GainTensor, TraceConfig
from owc_alloc.models.metrics import SinrReport
from owc_alloc.models.receiver import ADR
from owc_alloc.monitoring.memory import log_memory_usage
from owc_alloc.optics.channel import ChannelEngine, TraceResult
from owc_alloc.optics.metrics import build_report
from owc_alloc.scenarios.schema import ScenarioSpec

logger = structlog.get_logger(__name__)


def trace_config(
    spec: ScenarioSpec,
    settings: Settings,
    *,
    orders: Optional[Sequence[str]] = None,
    fine_element_m: Optional[float] = None,
    keep_responses: bool = False,
) -> TraceConfig:
    """Trace options: explicit overrides, then the scenario's ``trace`` block, then settings."""
    trace = spec.trace
    chosen_orders = orders or trace.orders or settings.order_tuple
    return TraceConfig(
        bin_width_s=trace.bin_width_s or settings.bin_width_s,
        orders=tuple(order for order in ("los", "first", "second") if order in chosen_orders),
        fine_element_m=fine_element_m or trace.fine_element_m or settings.fine_element_m,
        coarse_element_m=trace.coarse_element_m or settings.coarse_element_m,
        keep_responses=keep_responses,
    )


@dataclass
class Simulation:
    """One traced scenario."""

    spec: ScenarioSpec
    aps: List[AccessPoint]
    receivers: List[ADR]
    trace: TraceResult
    memory: Dict[str, float] = field(default_factory=dict)

    @property
    def tensor(self) -> GainTensor:
        return self.trace.tensor


def simulate(
    spec: ScenarioSpec, config: TraceConfig, engine: Optional[ChannelEngine] = None
) -> Simulation:
    """Trace the gain tensor of every user in ``spec``.

    Pass ``engine`` to reuse its room discretisation and illumination cache.
    """
    engine = engine or ChannelEngine(spec.to_room(), config)
    aps = spec.to_access_points()
    receivers = spec.to_receivers()
    result = engine.trace(aps, receivers)
    for ap_id, fraction in result.reflected_fraction.items():
        logger.debug("reflected_power_fraction", ap_id=ap_id, fraction=round(fraction, 6))
    return Simulation(
        spec=spec, aps=aps, receivers=receivers, trace=result, memory=log_memory_usage("trace")
    )


def build_problem(
    spec: ScenarioSpec,
    tensor: GainTensor,
    objective: ObjectiveMode = ObjectiveMode.SUM_LINEAR,
) -> AllocationProblem:
    return AllocationProblem.from_tensor(
        tensor,
        spec.to_access_points(),
        spec.to_noise(),
        wavelengths=spec.wavelength_set(),
        objective=objective,
        user_positions=spec.user_positions(),
    )


def report_with_bandwidth(
    assignment: Assignment, problem: AllocationProblem, tensor: Optional[GainTensor]
) -> SinrReport:
    """Like :func:`evaluate_assignment`, with each link's channel bandwidth attached."""
    check_assignment(assignment, problem)
    return build_report(
        assignment,
        problem.gains,
        problem.ap_ids,
        power_lookup(problem),
        problem.noise,
        bandwidth_hz=tensor.bandwidth_hz if tensor is not None else None,
        bandwidth_lower_bound=tensor.bandwidth_lower_bound if tensor is not None else None,
    )


@dataclass
class AllocationOutcome:
    """Optimal assignment plus its comparison with a reference assignment.

    Attributes:
        assignment: solver output
        report: per-user metrics of ``assignment``
        reference: reference assignment, if the scenario has one
        reference_report: the reference scored under the same model
        seconds: solver wall time
    """

    problem: AllocationProblem
    assignment: Assignment
    report: SinrReport
    reference: Optional[Assignment] = None
    reference_report: Optional[SinrReport] = None
    seconds: float = 0.0

    @property
    def objective(self) -> ObjectiveMode:
        return self.problem.objective

    @property
    def dominates(self) -> Optional[bool]:
        """True when the solver objective is at least the reference objective."""
        if self.reference_report is None:
            return None
        ours = self.report.objective_value(self.objective)
        theirs = self.reference_report.objective_value(self.objective)
        return ours >= theirs

    @property
    def concordance(self) -> Optional[float]:
        """Fraction of users whose (AP, wavelength) matches the reference."""
        if self.reference is None or len(self.reference) == 0:
            return None
        matches = sum(
            1
            for ours, theirs in zip(self.assignment.users, self.reference.users)
            if (ours.ap_id, ours.wavelength) == (theirs.ap_id, theirs.wavelength)
        )
        return matches / len(self.reference)

    def comparison_rows(self) -> List[Dict[str, object]]:
        """One row per user, our triple beside the reference triple."""
        if self.reference is None or self.reference_report is None:
            return []
        rows = []
        for user, (ours, theirs) in enumerate(zip(self.assignment.users, self.reference.users)):
            rows.append(
                {
                    "user": user + 1,
                    "ours_ap_id": ours.ap_id,
                    "ours_branch_id": ours.branch_id,
                    "ours_wavelength": ours.wavelength.label,
                    "reference_ap_id": theirs.ap_id,
                    "reference_branch_id": theirs.branch_id,
                    "reference_wavelength": theirs.wavelength.label,
                    "slot_match": (ours.ap_id, ours.wavelength)
                    == (theirs.ap_id, theirs.wavelength),
                    "ours_sinr_db": self.report.users[user].sinr_db,
                    "reference_sinr_db": self.reference_report.users[user].sinr_db,
                }
            )
        return rows


def allocate(
    problem: AllocationProblem,
    tensor: Optional[GainTensor] = None,
    reference: Optional[Assignment] = None,
) -> AllocationOutcome:
    """Solve ``problem`` exactly and score ``reference`` under the same model.

    Raises:
        InfeasibleAllocationError: more users than (access point, wavelength) slots
        FeasibilityError: the reference assignment breaks a constraint
    """
    started = time.perf_counter()
    assignment = solve_exact(problem)
    seconds = time.perf_counter() - started
    report = report_with_bandwidth(assignment, problem, tensor)
    reference_report = (
        report_with_bandwidth(reference, problem, tensor) if reference is not None else None
    )
    outcome = AllocationOutcome(
        problem=problem,
        assignment=assignment,
        report=report,
        reference=reference,
        reference_report=reference_report,
        seconds=seconds,
    )
    logger.info(
        "allocation_compared",
        objective=problem.objective.value,
        objective_linear=report.objective_linear,
        objective_db=report.objective_db,
        dominates=outcome.dominates,
        concordance=outcome.concordance,
    )
    return outcome


def sweep_offsets(start_deg: float, stop_deg: float, step_deg: float) -> List[float]:
    """Offsets ``start, start + step, …`` strictly below ``stop``.

    Raises:
        ValueError: ``step_deg`` is not positive
    """
    if not step_deg > 0:
        raise ValueError(f"sweep step must be > 0, got {step_deg}")
    count = max(0, math.ceil((stop_deg - start_deg) / step_deg - 1e-9))
    return [start_deg + i * step_deg for i in range(count)]


@dataclass
class SweepPoint:
    """Allocation summary at one receiver azimuth offset."""

    azimuth_offset_deg: float
    outcome: AllocationOutcome

    def row(self) -> Dict[str, float]:
        report = self.outcome.report
        sinr_db = [link.sinr_db for link in report.users]
        bandwidth = [
            link.channel_bandwidth_hz
            for link in report.users
            if link.channel_bandwidth_hz is not None
        ]
        return {
            "azimuth_offset_deg": self.azimuth_offset_deg,
            "min_sinr_db": min(sinr_db),
            "mean_sinr_db": float(np.mean(sinr_db)),
            "min_bandwidth_hz": min(bandwidth) if bandwidth else float("nan"),
            "mean_bandwidth_hz": float(np.mean(bandwidth)) if bandwidth else float("nan"),
            "objective_linear": report.objective_linear,
            "objective_db": report.objective_db,
        }


def sweep_orientation(
    spec: ScenarioSpec,
    config: TraceConfig,
    offsets_deg: Sequence[float],
    objective: ObjectiveMode = ObjectiveMode.SUM_LINEAR,
) -> List[SweepPoint]:
    """Re-trace and re-solve the scenario at each ADR azimuth offset.

    The room discretisation and access point illumination are shared across
    offsets; only the receiver side is traced again.
    """
    engine = ChannelEngine(spec.to_room(), config)
    points = []
    for offset in offsets_deg:
        rotated = spec.model_copy(
            update={"receiver": spec.receiver.model_copy(update={"azimuth_offset_deg": offset})}
        )
        simulation = simulate(rotated, config, engine)
        problem = build_problem(rotated, simulation.tensor, objective)
        outcome = allocate(problem, simulation.tensor)
        points.append(SweepPoint(azimuth_offset_deg=offset, outcome=outcome))
        logger.info(
            "sweep_offset_completed",
            azimuth_offset_deg=offset,
            min_sinr_db=round(outcome.report.min_sinr_db, 3),
        )
    return points
