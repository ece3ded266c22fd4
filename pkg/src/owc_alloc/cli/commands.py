"""Sub-command implementations.

Each ``cmd_*`` takes the parsed arguments, writes its outputs under one run
directory plus a ``manifest.json`` and returns the process exit code. Errors
propagate to :func:`owc_alloc.cli.main.main`, which maps them to exit codes.
"""

import argparse
import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import structlog

from owc_alloc import __version__
from owc_alloc.allocation.milp import write_milp
from owc_alloc.config import ObjectiveMode, get_settings, parse_orders
from owc_alloc.errors import ConfigError, ReportError
from owc_alloc.export.charts import grouped_bar_chart
from owc_alloc.export.tables import (
    COMPARISON_COLUMNS,
    SINR_COLUMNS,
    SWEEP_COLUMNS,
    read_csv,
    read_tensor_json,
    sinr_rows,
    write_csv,
    write_json,
    write_sinr_csv,
    write_tensor_csv,
    write_tensor_json,
)
from owc_alloc.models.allocation import AllocationProblem, Assignment
from owc_alloc.models.channel import GainTensor
from owc_alloc.models.metrics import SINR_THRESHOLD_DB
from owc_alloc.models.run import RunManifest
from owc_alloc.monitoring.memory import memory_snapshot
from owc_alloc.optics.channel import write_impulse_response_csv
from owc_alloc.pipeline import (
    AllocationOutcome,
    Simulation,
    allocate,
    build_problem,
    simulate,
    sweep_offsets,
    sweep_orientation,
    trace_config,
)
from owc_alloc.scenarios.catalog import builtin, wdma_toy_expected, wdma_toy_problem
from owc_alloc.scenarios.loader import load_config
from owc_alloc.scenarios.schema import ScenarioSpec, json_schema

logger = structlog.get_logger(__name__)

REPORT_DIR = "report"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunRecorder:
    """Collects the files one command writes and emits the run manifest."""

    command: str
    run_dir: Path
    config_hash: str
    scenario: Optional[int] = None
    system: Optional[int] = None
    started_at: str = field(default_factory=_now)
    outputs: List[str] = field(default_factory=list)
    timings_s: Dict[str, float] = field(default_factory=dict)

    def wrote(self, path: Path) -> Path:
        self.outputs.append(path.relative_to(self.run_dir).as_posix())
        logger.info("output_written", path=str(path))
        return path

    def finish(self) -> Path:
        manifest = RunManifest(
            command=self.command,
            config_hash=self.config_hash,
            tool_version=__version__,
            started_at=self.started_at,
            finished_at=_now(),
            scenario=self.scenario,
            system=self.system,
            outputs=sorted(self.outputs),
            timings_s={name: round(value, 6) for name, value in self.timings_s.items()},
            memory=memory_snapshot(),
        )
        return write_json(self.run_dir / "manifest.json", manifest.to_dict())


def _hash(*parts: Any) -> str:
    canonical = json.dumps(parts, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _output_root(args: argparse.Namespace) -> Path:
    return Path(args.output_dir) if args.output_dir else get_settings().output_dir


@dataclass
class _Target:
    spec: ScenarioSpec
    run_name: str
    scenario: Optional[int] = None
    system: Optional[int] = None


def resolve_target(args: argparse.Namespace) -> _Target:
    """The scenario a command runs on: ``--config`` or ``--scenario``/``--system``."""
    if getattr(args, "config", None):
        spec = load_config(args.config)
        return _Target(spec=spec, run_name=spec.name, scenario=spec.scenario_id)
    if getattr(args, "scenario", None) is None:
        raise ConfigError([("--scenario", "give --scenario and --system, or --config")])
    system = args.system if args.system is not None else 1
    spec = builtin(args.scenario, system)
    return _Target(
        spec=spec,
        run_name=f"scenario{args.scenario}_system{system}",
        scenario=args.scenario,
        system=system,
    )


def _orders(args: argparse.Namespace) -> Optional[Tuple[str, ...]]:
    return parse_orders(args.orders) if getattr(args, "orders", None) else None


def _objective(args: argparse.Namespace) -> ObjectiveMode:
    if getattr(args, "objective", None):
        return ObjectiveMode(args.objective)
    return get_settings().objective


def _print_timings(simulation: Simulation) -> None:
    print("Trace timing (s):")
    for order, seconds in simulation.trace.timings_s.items():
        print(f"  {order:<7}{seconds:10.3f}")
    print(f"  {'total':<7}{sum(simulation.trace.timings_s.values()):10.3f}")


def _write_tensor(
    recorder: RunRecorder, simulation: Simulation, impulse_responses: bool
) -> None:
    run_dir = recorder.run_dir
    tensor = simulation.tensor
    recorder.wrote(
        write_tensor_json(run_dir / "tensor.json", tensor, simulation.spec.user_positions())
    )
    recorder.wrote(write_tensor_csv(run_dir / "tensor.csv", tensor))
    if impulse_responses and tensor.impulse_responses:
        for (u, b, a), response in sorted(tensor.impulse_responses.items()):
            path = run_dir / "ir" / f"user{u + 1}_branch{b + 1}_ap{tensor.ap_ids[a]}.csv"
            write_impulse_response_csv(response, path)
            recorder.wrote(path)


def _trace(args: argparse.Namespace, target: _Target, keep_responses: bool) -> Simulation:
    config = trace_config(
        target.spec,
        get_settings(),
        orders=_orders(args),
        fine_element_m=getattr(args, "fine_element", None),
        keep_responses=keep_responses,
    )
    simulation = simulate(target.spec, config)
    _print_timings(simulation)
    return simulation


def cmd_simulate(args: argparse.Namespace) -> int:
    """Trace the gain tensor and write it as JSON and CSV."""
    target = resolve_target(args)
    run_dir = _output_root(args) / target.run_name
    recorder = RunRecorder(
        command="simulate",
        run_dir=run_dir,
        config_hash=_hash(
            target.spec.config_hash(), args.orders, args.fine_element, args.impulse_responses
        ),
        scenario=target.scenario,
        system=target.system,
    )
    simulation = _trace(args, target, keep_responses=args.impulse_responses)
    recorder.timings_s.update(simulation.trace.timings_s)
    _write_tensor(recorder, simulation, args.impulse_responses)
    recorder.finish()
    shape = "x".join(str(n) for n in simulation.tensor.dc_gain.shape)
    print(f"Gain tensor {shape} written to {run_dir}")
    return 0


def _check_tensor_matches(tensor: GainTensor, spec: ScenarioSpec) -> None:
    problems = []
    if tensor.n_users != len(spec.users):
        problems.append(("--tensor", f"has {tensor.n_users} users, scenario has {len(spec.users)}"))
    ids = sorted(ap.ap_id for ap in spec.transmitters.access_points)
    if sorted(tensor.ap_ids) != ids:
        problems.append(("--tensor", f"access points {list(tensor.ap_ids)} differ from {ids}"))
    if problems:
        raise ConfigError(problems)


def _print_comparison(outcome: AllocationOutcome) -> None:
    rows = outcome.comparison_rows()
    if not rows:
        return
    print("User  Ours (AP, λ, branch)   Reference (AP, λ, branch)   Match  SINR ours / ref (dB)")
    for row in rows:
        ours = f"({row['ours_ap_id']}, {row['ours_wavelength']}, {row['ours_branch_id']})"
        theirs = (
            f"({row['reference_ap_id']}, {row['reference_wavelength']}, "
            f"{row['reference_branch_id']})"
        )
        mark = "yes" if row["slot_match"] else "no"
        print(
            f"{row['user']:>4}  {ours:<21}  {theirs:<26}  {mark:<5}  "
            f"{row['ours_sinr_db']:7.2f} / {row['reference_sinr_db']:7.2f}"
        )


def _print_outcome(outcome: AllocationOutcome) -> None:
    report = outcome.report
    print(f"Objective mode: {outcome.objective.value}")
    print(f"  sum of linear SINRs: {report.objective_linear:.6g}")
    print(f"  sum of SINRs (dB):   {report.objective_db:.6g}")
    _print_comparison(outcome)
    if outcome.dominates is not None and outcome.reference_report is not None:
        verdict = "PASS" if outcome.dominates else "FAIL"
        ours = report.objective_value(outcome.objective)
        theirs = outcome.reference_report.objective_value(outcome.objective)
        print(f"Dominance check: {verdict} (ours {ours:.6g} vs reference {theirs:.6g})")
    if outcome.concordance is not None:
        print(f"Concordance with reference (AP, wavelength): {outcome.concordance:.0%}")


def assignment_document(outcome: AllocationOutcome) -> Dict[str, Any]:
    def triples(assignment: Assignment) -> List[Dict[str, Any]]:
        return [
            {
                "user": user + 1,
                "ap_id": triple.ap_id,
                "wavelength": triple.wavelength.label,
                "branch_id": triple.branch_id,
            }
            for user, triple in enumerate(assignment.users)
        ]

    document: Dict[str, Any] = {
        "objective_mode": outcome.objective.value,
        "objective_linear": outcome.report.objective_linear,
        "objective_db": outcome.report.objective_db,
        "assignment": triples(outcome.assignment),
        "sinr_db": [link.sinr_db for link in outcome.report.users],
    }
    if outcome.reference is not None and outcome.reference_report is not None:
        document["reference"] = {
            "assignment": triples(outcome.reference),
            "objective_linear": outcome.reference_report.objective_linear,
            "objective_db": outcome.reference_report.objective_db,
            "sinr_db": [link.sinr_db for link in outcome.reference_report.users],
        }
        document["dominates_reference"] = outcome.dominates
        document["concordance"] = outcome.concordance
    return document


def _write_allocation(
    recorder: RunRecorder,
    outcome: AllocationOutcome,
    problem: AllocationProblem,
    write_lp: bool,
) -> None:
    run_dir = recorder.run_dir
    recorder.wrote(write_json(run_dir / "assignment.json", assignment_document(outcome)))
    recorder.wrote(
        write_sinr_csv(
            run_dir / "sinr.csv", outcome.report, scenario=recorder.scenario, system=recorder.system
        )
    )
    rows = outcome.comparison_rows()
    if rows:
        recorder.wrote(write_csv(run_dir / "comparison.csv", COMPARISON_COLUMNS, rows))
    if write_lp:
        recorder.wrote(write_milp(problem, run_dir / "allocation.lp"))


def cmd_allocate(args: argparse.Namespace) -> int:
    """Solve the allocation on a traced, saved or built-in toy instance."""
    objective = _objective(args)
    root = _output_root(args)

    if args.toy:
        base = wdma_toy_problem()
        problem = AllocationProblem(
            gains=base.gains,
            ap_ids=base.ap_ids,
            tx_power=base.tx_power,
            wavelengths=base.wavelengths,
            noise=base.noise,
            objective=objective,
        )
        recorder = RunRecorder(
            command="allocate",
            run_dir=root / f"toy_{args.toy}",
            config_hash=_hash("toy", args.toy, objective.value),
        )
        outcome = allocate(problem, reference=wdma_toy_expected())
    else:
        target = resolve_target(args)
        recorder = RunRecorder(
            command="allocate",
            run_dir=root / target.run_name,
            config_hash=_hash(
                target.spec.config_hash(),
                args.tensor,
                args.orders,
                args.fine_element,
                objective.value,
            ),
            scenario=target.scenario,
            system=target.system,
        )
        if args.tensor:
            tensor = read_tensor_json(Path(args.tensor))
            _check_tensor_matches(tensor, target.spec)
        else:
            simulation = _trace(args, target, keep_responses=False)
            recorder.timings_s.update(simulation.trace.timings_s)
            tensor = simulation.tensor
            _write_tensor(recorder, simulation, impulse_responses=False)
        problem = build_problem(target.spec, tensor, objective)
        outcome = allocate(problem, tensor, reference=target.spec.reference())

    recorder.timings_s["allocate"] = outcome.seconds
    _write_allocation(recorder, outcome, problem, args.lp)
    recorder.finish()
    _print_outcome(outcome)
    return 0


def _collect_sinr_rows(results_dir: Path) -> List[Dict[str, str]]:
    if not results_dir.is_dir():
        raise ReportError(f"results directory {results_dir} does not exist")
    files = sorted(
        path
        for path in results_dir.glob("*/sinr.csv")
        if path.parent.name != REPORT_DIR
    )
    if not files:
        raise ReportError(f"no allocate outputs (*/sinr.csv) under {results_dir}")
    rows = []
    for path in files:
        for row in read_csv(path):
            missing = [column for column in SINR_COLUMNS if column not in row]
            if missing:
                raise ReportError(f"{path} lacks columns {missing}")
            row = dict(row)
            row["_run"] = path.parent.name
            rows.append(row)
    return rows


def _as_float(text: str) -> float:
    return float(text) if text else float("nan")


def _group_key(row: Dict[str, str]) -> Tuple[str, str]:
    scenario = f"scenario{row['scenario']}" if row["scenario"] else row["_run"]
    series = f"System {row['system']}" if row["system"] else row["_run"]
    return scenario, series


def threshold_rows(rows: List[Dict[str, str]]) -> List[Dict[str, Any]]:
    """Pass counts per run against the SINR threshold."""
    by_run: Dict[str, List[Dict[str, str]]] = {}
    for row in rows:
        by_run.setdefault(row["_run"], []).append(row)
    table = []
    for run, members in sorted(by_run.items()):
        sinr = [_as_float(row["sinr_db"]) for row in members]
        bandwidth = [
            _as_float(row["channel_bandwidth_hz"])
            for row in members
            if row["channel_bandwidth_hz"]
        ]
        table.append(
            {
                "run": run,
                "scenario": members[0]["scenario"],
                "system": members[0]["system"],
                "users": len(members),
                "passing": sum(1 for value in sinr if value >= SINR_THRESHOLD_DB),
                "min_sinr_db": min(sinr),
                "min_bandwidth_hz": min(bandwidth) if bandwidth else None,
            }
        )
    return table


THRESHOLD_COLUMNS = (
    "run",
    "scenario",
    "system",
    "users",
    "passing",
    "min_sinr_db",
    "min_bandwidth_hz",
)


def cmd_report(args: argparse.Namespace) -> int:
    """Merge allocate outputs into a summary table, threshold table and SVG charts."""
    results_dir = Path(args.results_dir) if args.results_dir else get_settings().output_dir
    rows = _collect_sinr_rows(results_dir)

    recorder = RunRecorder(
        command="report",
        run_dir=results_dir / REPORT_DIR,
        config_hash=_hash(sorted(row["_run"] for row in rows)),
    )
    ordered = sorted(rows, key=lambda row: (row["_run"], int(row["user"])))
    for row in ordered:
        row["passes_threshold"] = (
            "true" if _as_float(row["sinr_db"]) >= SINR_THRESHOLD_DB else "false"
        )
    report_dir = recorder.run_dir
    recorder.wrote(write_csv(report_dir / "sinr_summary.csv", SINR_COLUMNS, ordered))
    thresholds = threshold_rows(ordered)
    recorder.wrote(write_csv(report_dir / "threshold.csv", THRESHOLD_COLUMNS, thresholds))

    charts: Dict[str, Dict[str, Dict[str, List[float]]]] = {}
    for row in ordered:
        scenario, series = _group_key(row)
        group = charts.setdefault(scenario, {"sinr": {}, "bandwidth": {}})
        group["sinr"].setdefault(series, []).append(_as_float(row["sinr_db"]))
        group["bandwidth"].setdefault(series, []).append(
            _as_float(row["channel_bandwidth_hz"]) / 1e9
        )
    for scenario, group in sorted(charts.items()):
        recorder.wrote(
            grouped_bar_chart(
                report_dir / f"sinr_{scenario}.svg",
                dict(sorted(group["sinr"].items())),
                title=f"SINR per user, {scenario}",
                ylabel="SINR (dB)",
                threshold=SINR_THRESHOLD_DB,
                threshold_label=f"{SINR_THRESHOLD_DB} dB threshold",
            )
        )
        recorder.wrote(
            grouped_bar_chart(
                report_dir / f"bandwidth_{scenario}.svg",
                dict(sorted(group["bandwidth"].items())),
                title=f"Channel bandwidth per user, {scenario}",
                ylabel="Channel bandwidth (GHz)",
            )
        )
    recorder.finish()

    passing = sum(row["passing"] for row in thresholds)
    total = sum(row["users"] for row in thresholds)
    print(f"{passing}/{total} users at or above {SINR_THRESHOLD_DB} dB")
    for row in thresholds:
        print(f"  {row['run']:<24}{row['passing']}/{row['users']}  min {row['min_sinr_db']:.2f} dB")
    return 0


def cmd_sweep_orientation(args: argparse.Namespace) -> int:
    """Re-solve the allocation over a range of receiver azimuth offsets."""
    offsets = sweep_offsets(args.start, args.stop, args.step)
    target = resolve_target(args)
    objective = _objective(args)
    config = trace_config(
        target.spec,
        get_settings(),
        orders=_orders(args),
        fine_element_m=args.fine_element,
    )
    recorder = RunRecorder(
        command="sweep-orientation",
        run_dir=_output_root(args) / f"{target.run_name}_sweep",
        config_hash=_hash(
            target.spec.config_hash(),
            offsets,
            args.orders,
            args.fine_element,
            objective.value,
        ),
        scenario=target.scenario,
    )
    points = sweep_orientation(target.spec, config, offsets, objective)
    rows = [point.row() for point in points]
    recorder.wrote(write_csv(recorder.run_dir / "sweep.csv", SWEEP_COLUMNS, rows))
    per_offset = [
        dict(row, azimuth_offset_deg=point.azimuth_offset_deg)
        for point in points
        for row in sinr_rows(point.outcome.report, scenario=target.scenario)
    ]
    recorder.wrote(
        write_csv(
            recorder.run_dir / "sweep_users.csv",
            ("azimuth_offset_deg",) + SINR_COLUMNS,
            per_offset,
        )
    )
    recorder.finish()
    print("Offset (deg)  min SINR (dB)  mean SINR (dB)  min bandwidth (GHz)")
    for row in rows:
        print(
            f"{row['azimuth_offset_deg']:>12.1f}  {row['min_sinr_db']:>13.2f}  "
            f"{row['mean_sinr_db']:>14.2f}  {row['min_bandwidth_hz'] / 1e9:>19.3f}"
        )
    return 0


def cmd_schema(args: argparse.Namespace) -> int:
    """Print (or write) the scenario document JSON schema."""
    text = json.dumps(json_schema(), indent=2, sort_keys=True) + "\n"
    if args.output:
        path = Path(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("output_written", path=str(path))
    else:
        print(text, end="")
    return 0
