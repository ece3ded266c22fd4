"""CSV and JSON writers with frozen column orders.

Outputs must be byte-identical across reruns, so floats are written with a
fixed format, JSON keys are sorted and NaN becomes null.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from owc_alloc.errors import ReportError
from owc_alloc.models.channel import GainTensor
from owc_alloc.models.geometry import Vec3
from owc_alloc.models.metrics import SINR_THRESHOLD_DB, SinrReport

TENSOR_COLUMNS = (
    "user",
    "branch",
    "ap_id",
    "dc_gain",
    "los_gain",
    "first_gain",
    "second_gain",
    "bandwidth_hz",
    "bandwidth_lower_bound",
)

SINR_COLUMNS = (
    "scenario",
    "system",
    "user",
    "ap_id",
    "wavelength",
    "branch_id",
    "sinr_linear",
    "sinr_db",
    "ber",
    "channel_bandwidth_hz",
    "bandwidth_lower_bound",
    "signal_power_w",
    "noise_variance_a2",
    "interference_power_w",
    "passes_threshold",
)

SWEEP_COLUMNS = (
    "azimuth_offset_deg",
    "min_sinr_db",
    "mean_sinr_db",
    "min_bandwidth_hz",
    "mean_bandwidth_hz",
    "objective_linear",
    "objective_db",
)

COMPARISON_COLUMNS = (
    "user",
    "ours_ap_id",
    "ours_branch_id",
    "ours_wavelength",
    "reference_ap_id",
    "reference_branch_id",
    "reference_wavelength",
    "slot_match",
    "ours_sinr_db",
    "reference_sinr_db",
)


def format_value(value: Any) -> str:
    """Text form of one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ""
        return f"{float(value):.10g}"
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(column)) for column in columns])
    return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    with path.open("r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        return None if math.isnan(value) else float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_json(path: Path, document: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(document), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def tensor_document(
    tensor: GainTensor, user_positions: Optional[Sequence[Vec3]] = None
) -> Dict[str, Any]:
    document: Dict[str, Any] = {
        "shape": list(tensor.dc_gain.shape),
        "ap_ids": list(tensor.ap_ids),
        "dc_gain": tensor.dc_gain,
    }
    if tensor.bandwidth_hz is not None:
        document["bandwidth_hz"] = tensor.bandwidth_hz
    if tensor.bandwidth_lower_bound is not None:
        document["bandwidth_lower_bound"] = tensor.bandwidth_lower_bound
    if tensor.order_dc_gain is not None:
        document["order_dc_gain"] = dict(tensor.order_dc_gain)
    if user_positions is not None:
        document["user_positions_m"] = [[p.x, p.y, p.z] for p in user_positions]
    return document


def write_tensor_json(
    path: Path, tensor: GainTensor, user_positions: Optional[Sequence[Vec3]] = None
) -> Path:
    return write_json(path, tensor_document(tensor, user_positions))


def read_tensor_json(path: Path) -> GainTensor:
    """Load a tensor written by :func:`write_tensor_json`.

    Raises:
        ReportError: the file is missing or is not a tensor document
    """
    if not path.exists():
        raise ReportError(f"tensor file {path} does not exist")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
        dc_gain = np.array(document["dc_gain"], dtype=float)
        bandwidth = document.get("bandwidth_hz")
        lower = document.get("bandwidth_lower_bound")
        orders = document.get("order_dc_gain")
        return GainTensor(
            dc_gain=dc_gain,
            ap_ids=tuple(int(ap_id) for ap_id in document["ap_ids"]),
            bandwidth_hz=(
                np.array(bandwidth, dtype=float) if bandwidth is not None else None
            ),
            bandwidth_lower_bound=np.array(lower, dtype=bool) if lower is not None else None,
            order_dc_gain=(
                {name: np.array(values, dtype=float) for name, values in orders.items()}
                if orders is not None
                else None
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ReportError(f"{path} is not a gain tensor document: {exc}") from exc


def tensor_rows(tensor: GainTensor) -> List[Dict[str, Any]]:
    rows = []
    orders = tensor.order_dc_gain or {}
    for u in range(tensor.n_users):
        for b in range(tensor.n_branches):
            for a, ap_id in enumerate(tensor.ap_ids):
                index = (u, b, a)
                row: Dict[str, Any] = {
                    "user": u + 1,
                    "branch": b + 1,
                    "ap_id": ap_id,
                    "dc_gain": float(tensor.dc_gain[index]),
                }
                for order in ("los", "first", "second"):
                    if order in orders:
                        row[f"{order}_gain"] = float(orders[order][index])
                if tensor.bandwidth_hz is not None:
                    row["bandwidth_hz"] = float(tensor.bandwidth_hz[index])
                if tensor.bandwidth_lower_bound is not None:
                    row["bandwidth_lower_bound"] = bool(tensor.bandwidth_lower_bound[index])
                rows.append(row)
    return rows


def write_tensor_csv(path: Path, tensor: GainTensor) -> Path:
    return write_csv(path, TENSOR_COLUMNS, tensor_rows(tensor))


def sinr_rows(
    report: SinrReport, scenario: Optional[int] = None, system: Optional[int] = None
) -> List[Dict[str, Any]]:
    rows = []
    for link in report.users:
        rows.append(
            {
                "scenario": scenario,
                "system": system,
                "user": link.user,
                "ap_id": link.ap_id,
                "wavelength": link.wavelength.label,
                "branch_id": link.branch_id,
                "sinr_linear": link.sinr_linear,
                "sinr_db": link.sinr_db,
                "ber": link.ber,
                "channel_bandwidth_hz": link.channel_bandwidth_hz,
                "bandwidth_lower_bound": link.bandwidth_lower_bound,
                "signal_power_w": link.signal_power_w,
                "noise_variance_a2": link.noise_variance_a2,
                "interference_power_w": sum(link.interference_powers_w.values()),
                "passes_threshold": link.sinr_db >= SINR_THRESHOLD_DB,
            }
        )
    return rows


def write_sinr_csv(
    path: Path, report: SinrReport, scenario: Optional[int] = None, system: Optional[int] = None
) -> Path:
    return write_csv(path, SINR_COLUMNS, sinr_rows(report, scenario, system))
