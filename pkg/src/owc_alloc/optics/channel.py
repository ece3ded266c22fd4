"""Ray-traced channel engine.

Light reaches a receiver branch directly (LOS), after one diffuse bounce off the
fine patch grid, or after two bounces over the coarse grid. Each path's gain is
a product of Lambertian hops and lands in a time bin given by its total length.
The LDs of a grid unit are traced one by one on the direct path; reflections
start from the unit centre.

Work is split per (user, branch): the branch's collection vectors and the
patch-to-patch kernel restricted to the patches that branch can see are built
once and reused for every access point. Access point illumination of the grids
is cached by the engine and shared read-only between tasks.
"""

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from owc_alloc.errors import GeometryError
from owc_alloc.models.channel import (
    SPEED_OF_LIGHT,
    AccessPoint,
    GainTensor,
    ImpulseResponse,
    TraceConfig,
)
from owc_alloc.models.geometry import Room
from owc_alloc.models.receiver import ADR, ReceiverBranch
from owc_alloc.optics.geometry import (
    PatchGrid,
    discretize,
    hop_geometry,
    lambertian_gain,
    lambertian_gain_array,
)
from owc_alloc.parallel.base import ExecutionBackend
from owc_alloc.parallel.factory import get_execution_backend

logger = structlog.get_logger(__name__)

ORDERS = ("los", "first", "second")

# room surfaces reflect as first-order Lambertian
_PATCH_ORDER = 1.0

# slack on the FOV comparison so a ray exactly on the cone edge is accepted
_FOV_TOLERANCE = 1e-12


@dataclass(frozen=True)
class RoomPatches:
    """The two discretisations of one room."""

    room: Room
    fine: PatchGrid
    coarse: PatchGrid

    @classmethod
    def build(cls, room: Room, config: TraceConfig) -> "RoomPatches":
        fine = discretize(room, config.fine_element_m)
        coarse = discretize(room, config.coarse_element_m)
        logger.debug(
            "room_discretized",
            fine_patches=len(fine),
            coarse_patches=len(coarse),
            fine_edge_m=config.fine_element_m,
            coarse_edge_m=config.coarse_element_m,
        )
        return cls(room=room, fine=fine, coarse=coarse)


@dataclass(frozen=True)
class _Illumination:
    """Power landing on each patch from one emitter, already times reflectivity."""

    weight: np.ndarray
    dist: np.ndarray


@dataclass(frozen=True)
class _Collection:
    """Per-patch gain into one branch (FOV gated) and path length."""

    hop: np.ndarray
    dist: np.ndarray

    @property
    def visible(self) -> np.ndarray:
        return np.flatnonzero(self.hop)


@dataclass
class TraceResult:
    """Gain tensor plus the bookkeeping of how it was produced.

    Attributes:
        tensor: the assembled gain tensor
        timings_s: seconds spent per reflection order, summed over tasks
        reflected_fraction: per access point, Σ ρ·hop over the fine grid
    """

    tensor: GainTensor
    timings_s: Dict[str, float] = field(default_factory=dict)
    reflected_fraction: Dict[int, float] = field(default_factory=dict)


def _cos_fov(branch: ReceiverBranch) -> float:
    return math.cos(math.radians(branch.fov_deg)) - _FOV_TOLERANCE


def _first_arrival(ap: AccessPoint, branch: ReceiverBranch) -> float:
    return min((branch.position - pos).norm() for pos, _ in ap.emitters()) / SPEED_OF_LIGHT


def _los_arrivals(ap: AccessPoint, branch: ReceiverBranch) -> Tuple[np.ndarray, np.ndarray]:
    delays = []
    gains = []
    cos_fov = _cos_fov(branch)
    for pos, weight in ap.emitters():
        offset = branch.position - pos
        d = offset.norm()
        if d == 0.0:
            raise GeometryError(f"receiver coincides with access point {ap.ap_id}")
        direction = offset.scaled(1.0 / d)
        cos_emit = ap.orientation.dot(direction)
        cos_incid = -branch.normal.dot(direction)
        gain = 0.0
        if cos_emit > 0.0 and cos_incid >= cos_fov:
            gain = weight * lambertian_gain(
                ap.lambertian_order, d, min(cos_emit, 1.0), min(cos_incid, 1.0), branch.area
            )
        delays.append(d / SPEED_OF_LIGHT)
        gains.append(gain)
    return np.array(delays), np.array(gains)


def los_contribution(ap: AccessPoint, branch: ReceiverBranch) -> Tuple[float, float]:
    """Direct-path gain and delay between an access point and one branch.

    The gain is zero when the arrival lies outside the branch's field of view or
    behind the emitter. The delay is the centre-to-branch distance over c.
    """
    _, gains = _los_arrivals(ap, branch)
    delay = (branch.position - ap.position).norm() / SPEED_OF_LIGHT
    return float(np.sum(gains)), delay


def illuminate(ap: AccessPoint, grid: PatchGrid) -> List[_Illumination]:
    """Reflected power per patch, with the whole unit at its centre."""
    dist, direction = hop_geometry(ap.position.array, grid.centers)
    cos_emit = direction @ ap.orientation.array
    cos_incid = -np.einsum("ij,ij->i", direction, grid.normals)
    hop = lambertian_gain_array(ap.lambertian_order, dist, cos_emit, cos_incid, grid.areas)
    return [_Illumination(weight=grid.reflectivity * hop, dist=dist)]


def reflected_power_fraction(ap: AccessPoint, grid: PatchGrid) -> float:
    """Share of transmitted power that leaves the walls after the first bounce."""
    return float(sum(np.sum(lit.weight) for lit in illuminate(ap, grid)))


def collect(branch: ReceiverBranch, grid: PatchGrid) -> _Collection:
    """Gain from every patch into ``branch``; arrivals outside the FOV give 0."""
    dist, direction = hop_geometry(grid.centers, branch.position.array)
    cos_emit = np.einsum("ij,ij->i", direction, grid.normals)
    cos_incid = -(direction @ branch.normal.array)
    hop = lambertian_gain_array(_PATCH_ORDER, dist, cos_emit, cos_incid, branch.area)
    hop = np.where(cos_incid >= _cos_fov(branch), hop, 0.0)
    return _Collection(hop=hop, dist=dist)


def pair_kernel(grid: PatchGrid, targets: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Patch-to-patch gain times target reflectivity, shape (len(grid), len(targets)).

    Coincident and mutually invisible pairs (coplanar, back-facing) get 0.
    """
    dst = grid.centers[targets]
    dist, direction = hop_geometry(grid.centers[:, None, :], dst[None, :, :])
    cos_emit = np.einsum("nmk,nk->nm", direction, grid.normals)
    cos_incid = -np.einsum("nmk,mk->nm", direction, grid.normals[targets])
    hop = lambertian_gain_array(
        _PATCH_ORDER, dist, cos_emit, cos_incid, grid.areas[targets][None, :]
    )
    return hop * grid.reflectivity[targets][None, :], dist


def _first_order(
    lit: Sequence[_Illumination], seen: _Collection, t0: float, bin_width: float
) -> ImpulseResponse:
    cols = seen.visible
    delays = []
    gains = []
    for source in lit:
        gains.append(source.weight[cols] * seen.hop[cols])
        delays.append((source.dist[cols] + seen.dist[cols]) / SPEED_OF_LIGHT)
    if not gains:
        return ImpulseResponse.zero(t0, bin_width)
    return ImpulseResponse.from_arrivals(
        np.concatenate(delays), np.concatenate(gains), t0, bin_width
    )


def _second_order(
    lit: Sequence[_Illumination],
    seen: _Collection,
    kernel: np.ndarray,
    kernel_dist: np.ndarray,
    t0: float,
    bin_width: float,
) -> ImpulseResponse:
    cols = seen.visible
    last_hop = seen.hop[cols][None, :]
    last_dist = seen.dist[cols][None, :]
    delays = []
    gains = []
    for source in lit:
        rows = np.flatnonzero(source.weight)
        gains.append((source.weight[rows, None] * kernel[rows] * last_hop).ravel())
        delays.append(
            ((source.dist[rows, None] + kernel_dist[rows] + last_dist) / SPEED_OF_LIGHT).ravel()
        )
    if not gains:
        return ImpulseResponse.zero(t0, bin_width)
    return ImpulseResponse.from_arrivals(
        np.concatenate(delays), np.concatenate(gains), t0, bin_width
    )


def first_order_contribution(
    ap: AccessPoint,
    branch: ReceiverBranch,
    patches_fine: PatchGrid,
    *,
    bin_width: float = 1e-11,
    t0: Optional[float] = None,
) -> ImpulseResponse:
    """Single-bounce response over the fine grid."""
    start = _first_arrival(ap, branch) if t0 is None else t0
    lit = illuminate(ap, patches_fine)
    return _first_order(lit, collect(branch, patches_fine), start, bin_width)


def second_order_contribution(
    ap: AccessPoint,
    branch: ReceiverBranch,
    patches_coarse: PatchGrid,
    *,
    bin_width: float = 1e-11,
    t0: Optional[float] = None,
) -> ImpulseResponse:
    """Two-bounce response over ordered patch pairs of the coarse grid."""
    start = _first_arrival(ap, branch) if t0 is None else t0
    seen = collect(branch, patches_coarse)
    kernel, kernel_dist = pair_kernel(patches_coarse, seen.visible)
    return _second_order(
        illuminate(ap, patches_coarse), seen, kernel, kernel_dist, start, bin_width
    )


def impulse_response(
    ap: AccessPoint,
    branch: ReceiverBranch,
    config: TraceConfig,
    patches: RoomPatches,
) -> ImpulseResponse:
    """Sum of the orders selected in ``config`` for one link."""
    t0 = _first_arrival(ap, branch)
    bin_width = config.bin_width_s
    response = ImpulseResponse.zero(t0, bin_width)
    if config.includes("los"):
        delays, gains = _los_arrivals(ap, branch)
        response = response + ImpulseResponse.from_arrivals(delays, gains, t0, bin_width)
    if config.includes("first"):
        response = response + first_order_contribution(
            ap, branch, patches.fine, bin_width=bin_width, t0=t0
        )
    if config.includes("second"):
        response = response + second_order_contribution(
            ap, branch, patches.coarse, bin_width=bin_width, t0=t0
        )
    return response


@dataclass
class _LinkTrace:
    """Output of one (user, branch) task: one response per access point."""

    responses: List[ImpulseResponse]
    order_dc: Dict[str, np.ndarray]
    seconds: Dict[str, float]


class ChannelEngine:
    """Traces gain tensors for one room and trace configuration.

    Attributes:
        config: orders, bin width and element sizes
        patches: fine and coarse room discretisations
        backend: where (user, branch) tasks run
    """

    def __init__(
        self,
        room: Room,
        config: TraceConfig,
        backend: Optional[ExecutionBackend] = None,
    ):
        self.config = config
        self.patches = RoomPatches.build(room, config)
        self.backend = backend or get_execution_backend()
        self._lit: Dict[Tuple[str, int], List[_Illumination]] = {}

    def _illumination(self, ap: AccessPoint, grid_name: str) -> List[_Illumination]:
        key = (grid_name, ap.ap_id)
        if key not in self._lit:
            grid = self.patches.fine if grid_name == "fine" else self.patches.coarse
            self._lit[key] = illuminate(ap, grid)
        return self._lit[key]

    def _trace_branch(self, aps: Sequence[AccessPoint], branch: ReceiverBranch) -> _LinkTrace:
        config = self.config
        bin_width = config.bin_width_s
        seconds = {order: 0.0 for order in ORDERS}
        order_dc = {order: np.zeros(len(aps)) for order in ORDERS}
        responses = []

        seen_fine = collect(branch, self.patches.fine) if config.includes("first") else None
        seen_coarse = None
        kernel = kernel_dist = None
        if config.includes("second"):
            started = time.perf_counter()
            seen_coarse = collect(branch, self.patches.coarse)
            kernel, kernel_dist = pair_kernel(self.patches.coarse, seen_coarse.visible)
            seconds["second"] += time.perf_counter() - started

        for i, ap in enumerate(aps):
            t0 = _first_arrival(ap, branch)
            response = ImpulseResponse.zero(t0, bin_width)
            if config.includes("los"):
                started = time.perf_counter()
                delays, gains = _los_arrivals(ap, branch)
                part = ImpulseResponse.from_arrivals(delays, gains, t0, bin_width)
                order_dc["los"][i] = part.dc_gain
                response = response + part
                seconds["los"] += time.perf_counter() - started
            if seen_fine is not None:
                started = time.perf_counter()
                part = _first_order(self._illumination(ap, "fine"), seen_fine, t0, bin_width)
                order_dc["first"][i] = part.dc_gain
                response = response + part
                seconds["first"] += time.perf_counter() - started
            if seen_coarse is not None:
                started = time.perf_counter()
                part = _second_order(
                    self._illumination(ap, "coarse"),
                    seen_coarse,
                    kernel,
                    kernel_dist,
                    t0,
                    bin_width,
                )
                order_dc["second"][i] = part.dc_gain
                response = response + part
                seconds["second"] += time.perf_counter() - started
            responses.append(response)
        return _LinkTrace(responses=responses, order_dc=order_dc, seconds=seconds)

    def trace(self, aps: Sequence[AccessPoint], receivers: Sequence[ADR]) -> TraceResult:
        """Fill the gain tensor for every (user, branch, access point) triple."""
        # imported here: metrics depends on the models only, never on the engine
        from owc_alloc.optics.metrics import channel_bandwidth

        room = self.patches.room
        for user, adr in enumerate(receivers):
            if not room.contains(adr.position):
                raise GeometryError(f"user {user + 1} at {adr.position} lies outside the room")
        n_users = len(receivers)
        n_branches = max((len(adr.branches) for adr in receivers), default=0)
        n_aps = len(aps)

        # warm the illumination cache before tasks share it
        for ap in aps:
            if self.config.includes("first"):
                self._illumination(ap, "fine")
            if self.config.includes("second"):
                self._illumination(ap, "coarse")

        links = [
            (u, b, branch)
            for u, adr in enumerate(receivers)
            for b, branch in enumerate(adr.branches)
        ]
        logger.info(
            "trace_started",
            users=n_users,
            branches=n_branches,
            aps=n_aps,
            orders=",".join(self.config.orders),
        )

        def trace_link(branch: ReceiverBranch) -> _LinkTrace:
            return self._trace_branch(aps, branch)

        started = time.perf_counter()
        branches = [branch for _, _, branch in links]
        traces: List[_LinkTrace] = self.backend.map("trace", trace_link, branches)

        dc_gain = np.zeros((n_users, n_branches, n_aps))
        bandwidth = np.full((n_users, n_branches, n_aps), np.nan)
        lower_bound = np.zeros((n_users, n_branches, n_aps), dtype=bool)
        order_dc = {order: np.zeros_like(dc_gain) for order in self.config.orders}
        timings = {order: 0.0 for order in self.config.orders}
        responses: Dict[Tuple[int, int, int], ImpulseResponse] = {}

        for (u, b, _), link in zip(links, traces):
            for order in self.config.orders:
                order_dc[order][u, b, :] = link.order_dc[order]
                timings[order] += link.seconds[order]
            for a, response in enumerate(link.responses):
                dc_gain[u, b, a] = response.dc_gain
                if response.dc_gain > 0.0:
                    estimate = channel_bandwidth(response)
                    bandwidth[u, b, a] = estimate.hz
                    lower_bound[u, b, a] = estimate.lower_bound
                if self.config.keep_responses:
                    responses[(u, b, a)] = response

        tensor = GainTensor(
            dc_gain=dc_gain,
            ap_ids=tuple(ap.ap_id for ap in aps),
            bandwidth_hz=bandwidth,
            bandwidth_lower_bound=lower_bound,
            impulse_responses=responses if self.config.keep_responses else None,
            order_dc_gain=order_dc,
        )
        reflected = {
            ap.ap_id: float(sum(np.sum(lit.weight) for lit in self._illumination(ap, "fine")))
            for ap in aps
        }
        logger.info(
            "trace_completed",
            elapsed_s=round(time.perf_counter() - started, 3),
            **{f"{order}_s": round(seconds, 3) for order, seconds in timings.items()},
        )
        return TraceResult(tensor=tensor, timings_s=timings, reflected_fraction=reflected)


def gain_tensor(
    aps: Sequence[AccessPoint],
    receivers: Sequence[ADR],
    config: TraceConfig,
    room: Room,
    backend: Optional[ExecutionBackend] = None,
) -> GainTensor:
    """Trace every (user, branch, access point) link and return the DC gains."""
    return ChannelEngine(room, config, backend).trace(aps, receivers).tensor


def write_impulse_response_csv(response: ImpulseResponse, path: Path) -> None:
    """Dump ``time_s,gain_per_bin`` rows for one response."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write("time_s,gain_per_bin\n")
        for t, gain in zip(response.times, response.bins):
            handle.write(f"{t:.6e},{gain:.9e}\n")
