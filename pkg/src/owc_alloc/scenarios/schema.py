"""Scenario document schema.

A scenario document fixes everything physical about a run: the room, the light
units, the receiver and where the users stand. Field names carry their units.
Anything left out takes its default from the reference room configuration.
"""

import hashlib
import json
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from owc_alloc.config import LdLayout
from owc_alloc.models.allocation import Assignment
from owc_alloc.models.channel import LD_GRID_PITCH_M, LD_POWER_W, LDS_PER_UNIT, AccessPoint
from owc_alloc.models.geometry import Room, Vec3
from owc_alloc.models.receiver import ADR, BRANCHES_PER_ADR, NoiseModel
from owc_alloc.models.wavelength import ALL_WAVELENGTHS, Wavelength
from owc_alloc.optics.receiver import (
    BRANCH_ELEVATION_DEG,
    BRANCH_FOV_DEG,
    PHOTODETECTOR_AREA_M2,
    SYSTEM_IDS,
    build_adr_with_offset,
    system_offset,
)

SCHEMA_VERSION = 1

DEFAULT_AP_POSITIONS_M: Tuple[Tuple[float, float, float], ...] = (
    (1.0, 1.0, 3.0),
    (1.0, 3.0, 3.0),
    (1.0, 5.0, 3.0),
    (1.0, 7.0, 3.0),
    (3.0, 1.0, 3.0),
    (3.0, 3.0, 3.0),
    (3.0, 5.0, 3.0),
    (3.0, 7.0, 3.0),
)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PositionSpec(_Strict):
    """A point in room coordinates."""

    x_m: float
    y_m: float
    z_m: float

    def to_vec(self) -> Vec3:
        return Vec3(self.x_m, self.y_m, self.z_m)


class RoomSpec(_Strict):
    """Room dimensions and surface reflectivities."""

    width_m: float = Field(default=4.0, gt=0)
    length_m: float = Field(default=8.0, gt=0)
    height_m: float = Field(default=3.0, gt=0)
    reflectivity_walls_ceiling: float = Field(default=0.8, ge=0, le=1)
    reflectivity_floor: float = Field(default=0.3, ge=0, le=1)
    comm_floor_m: float = Field(default=1.0, gt=0)

    def to_room(self) -> Room:
        return Room(
            width_x=self.width_m,
            length_y=self.length_m,
            height_z=self.height_m,
            reflectivity_walls_ceiling=self.reflectivity_walls_ceiling,
            reflectivity_floor=self.reflectivity_floor,
            comm_floor_z=self.comm_floor_m,
        )


class AccessPointSpec(_Strict):
    """One ceiling light unit."""

    ap_id: int = Field(ge=1)
    position: PositionSpec
    lambertian_order: float = Field(default=1.0, gt=0)


def _default_access_points() -> List[AccessPointSpec]:
    return [
        AccessPointSpec(ap_id=i + 1, position=PositionSpec(x_m=x, y_m=y, z_m=z))
        for i, (x, y, z) in enumerate(DEFAULT_AP_POSITIONS_M)
    ]


class TransmitterSpec(_Strict):
    """Laser diode powers and unit placement.

    The LDs of a unit sit on a 3 x 4 grid; their path differences set
    the direct-path bandwidth. ``colocated`` collapses each unit to a point.
    """

    ld_power_w: Dict[str, float] = Field(
        default_factory=lambda: {w.value: p for w, p in LD_POWER_W.items()}
    )
    lds_per_unit: int = Field(default=LDS_PER_UNIT, ge=1)
    ld_layout: LdLayout = LdLayout.GRID
    ld_grid_spacing_m: float = Field(default=LD_GRID_PITCH_M, gt=0)
    access_points: List[AccessPointSpec] = Field(default_factory=_default_access_points)


class ReceiverSpec(_Strict):
    """Angle diversity receiver geometry and noise.

    ``azimuth_offset_deg`` overrides the offset implied by ``system_id``.
    ``bit_rate_bps`` sets the receiver bandwidth to 0.7 x the OOK bit rate and
    takes precedence over ``bandwidth_hz``.
    """

    system_id: int = Field(default=1, ge=1, le=3)
    azimuth_offset_deg: Optional[float] = None
    elevation_deg: float = Field(default=BRANCH_ELEVATION_DEG, ge=0, le=90)
    fov_deg: float = Field(default=BRANCH_FOV_DEG, gt=0, le=90)
    area_m2: float = Field(default=PHOTODETECTOR_AREA_M2, gt=0)
    noise_current_density_a_per_sqrt_hz: float = Field(default=4.47e-12, gt=0)
    bandwidth_hz: float = Field(default=4e9, gt=0)
    bit_rate_bps: Optional[float] = Field(default=None, gt=0)
    responsivity_a_per_w: Dict[str, float] = Field(
        default_factory=lambda: {
            w.value: r for w, r in NoiseModel().responsivity.items()
        }
    )

    @property
    def offset_deg(self) -> float:
        if self.azimuth_offset_deg is not None:
            return self.azimuth_offset_deg
        return system_offset(self.system_id)


class TraceSpec(_Strict):
    """Per-scenario overrides of the process trace settings."""

    bin_width_s: Optional[float] = Field(default=None, gt=0)
    fine_element_m: Optional[float] = Field(default=None, gt=0)
    coarse_element_m: Optional[float] = Field(default=None, gt=0)
    orders: Optional[List[Literal["los", "first", "second"]]] = None


class ReferenceRowSpec(_Strict):
    """One published (AP, branch, wavelength) row."""

    ap_id: int = Field(ge=1)
    branch_id: int = Field(ge=1, le=BRANCHES_PER_ADR)
    wavelength: str


def _position_problems(path: str, pos: PositionSpec, room: RoomSpec) -> List[Tuple[str, str]]:
    found = []
    for axis, limit, name in (("x_m", room.width_m, "width_m"), ("y_m", room.length_m, "length_m")):
        value = getattr(pos, axis)
        if not 0.0 <= value <= limit:
            found.append((f"{path}.{axis}", f"must lie in [0, {name} = {limit}], got {value}"))
    if not 0.0 < pos.z_m <= room.height_m:
        found.append(
            (f"{path}.z_m", f"must lie in (0, height_m = {room.height_m}], got {pos.z_m}")
        )
    return found


class ScenarioSpec(_Strict):
    """A complete run configuration."""

    schema_version: Literal[1] = SCHEMA_VERSION
    name: str = "custom"
    scenario_id: Optional[int] = None
    room: RoomSpec = Field(default_factory=RoomSpec)
    transmitters: TransmitterSpec = Field(default_factory=TransmitterSpec)
    receiver: ReceiverSpec = Field(default_factory=ReceiverSpec)
    trace: TraceSpec = Field(default_factory=TraceSpec)
    wavelengths: List[str] = Field(default_factory=lambda: [w.value for w in ALL_WAVELENGTHS])
    users: List[PositionSpec] = Field(min_length=1)
    reference_assignment: Optional[List[ReferenceRowSpec]] = None

    def problems(self) -> List[Tuple[str, str]]:
        """Cross-field checks pydantic field constraints cannot express."""
        found: List[Tuple[str, str]] = []
        room = self.room
        if not room.comm_floor_m < room.height_m:
            found.append(
                (
                    "room.comm_floor_m",
                    f"must be below height_m = {room.height_m}, got {room.comm_floor_m}",
                )
            )
        for i, user in enumerate(self.users):
            found.extend(_position_problems(f"users.{i}", user, room))

        ids = [ap.ap_id for ap in self.transmitters.access_points]
        if not ids:
            found.append(("transmitters.access_points", "at least one access point is required"))
        if len(set(ids)) != len(ids):
            found.append(("transmitters.access_points", f"duplicate ap_id in {ids}"))
        for i, ap in enumerate(self.transmitters.access_points):
            found.extend(
                _position_problems(f"transmitters.access_points.{i}.position", ap.position, room)
            )

        found.extend(self._wavelength_problems())
        if self.reference_assignment is not None:
            rows = len(self.reference_assignment)
            if rows != len(self.users):
                found.append(
                    ("reference_assignment", f"has {rows} rows for {len(self.users)} users")
                )
            for i, row in enumerate(self.reference_assignment):
                if row.ap_id not in ids:
                    found.append((f"reference_assignment.{i}.ap_id", f"unknown ap_id {row.ap_id}"))
        return found

    def _wavelength_problems(self) -> List[Tuple[str, str]]:
        found = []
        named = [
            ("wavelengths", list(self.wavelengths)),
            ("transmitters.ld_power_w", list(self.transmitters.ld_power_w)),
            ("receiver.responsivity_a_per_w", list(self.receiver.responsivity_a_per_w)),
        ]
        if self.reference_assignment is not None:
            named.append(
                ("reference_assignment", [row.wavelength for row in self.reference_assignment])
            )
        for path, names in named:
            for name in names:
                try:
                    Wavelength.parse(name)
                except ValueError:
                    found.append((path, f"unknown wavelength {name!r}"))
        for path, table in (
            ("transmitters.ld_power_w", self.transmitters.ld_power_w),
            ("receiver.responsivity_a_per_w", self.receiver.responsivity_a_per_w),
        ):
            for name, value in table.items():
                if value < 0 or (path.startswith("receiver") and value == 0):
                    found.append((f"{path}.{name}", f"must be positive, got {value}"))
        if not self.wavelengths:
            found.append(("wavelengths", "at least one wavelength is required"))
        return found

    # conversions to the domain models

    def to_room(self) -> Room:
        return self.room.to_room()

    def wavelength_set(self) -> Tuple[Wavelength, ...]:
        chosen = {Wavelength.parse(name) for name in self.wavelengths}
        return tuple(w for w in ALL_WAVELENGTHS if w in chosen)

    def to_access_points(self) -> List[AccessPoint]:
        tx = self.transmitters
        ld_power = {Wavelength.parse(name): p for name, p in tx.ld_power_w.items()}
        power = {w: tx.lds_per_unit * ld_power.get(w, 0.0) for w in ALL_WAVELENGTHS}
        return [
            AccessPoint(
                ap_id=ap.ap_id,
                position=ap.position.to_vec(),
                lambertian_order=ap.lambertian_order,
                tx_power=dict(power),
                ld_layout=tx.ld_layout,
                ld_spacing=tx.ld_grid_spacing_m,
            )
            for ap in tx.access_points
        ]

    def to_receivers(self) -> List[ADR]:
        rx = self.receiver
        return [
            build_adr_with_offset(
                user.to_vec(),
                rx.offset_deg,
                elevation_deg=rx.elevation_deg,
                fov_deg=rx.fov_deg,
                area_m2=rx.area_m2,
                system_id=rx.system_id if rx.azimuth_offset_deg is None else 0,
            )
            for user in self.users
        ]

    def to_noise(self) -> NoiseModel:
        rx = self.receiver
        responsivity = dict(NoiseModel().responsivity)
        responsivity.update(
            {Wavelength.parse(name): r for name, r in rx.responsivity_a_per_w.items()}
        )
        if rx.bit_rate_bps is not None:
            return NoiseModel.for_bit_rate(
                rx.bit_rate_bps,
                preamp_current_density=rx.noise_current_density_a_per_sqrt_hz,
                responsivity=responsivity,
            )
        return NoiseModel(
            preamp_current_density=rx.noise_current_density_a_per_sqrt_hz,
            rx_bandwidth=rx.bandwidth_hz,
            responsivity=responsivity,
        )

    def reference(self) -> Optional[Assignment]:
        if self.reference_assignment is None:
            return None
        return Assignment.from_triples(
            [(row.ap_id, row.wavelength, row.branch_id) for row in self.reference_assignment]
        )

    def user_positions(self) -> List[Vec3]:
        return [user.to_vec() for user in self.users]

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def json_schema() -> Dict[str, object]:
    """Published JSON schema of scenario documents."""
    return ScenarioSpec.model_json_schema()


__all__ = [
    "SCHEMA_VERSION",
    "SYSTEM_IDS",
    "AccessPointSpec",
    "PositionSpec",
    "ReceiverSpec",
    "ReferenceRowSpec",
    "RoomSpec",
    "ScenarioSpec",
    "TraceSpec",
    "TransmitterSpec",
    "json_schema",
]
