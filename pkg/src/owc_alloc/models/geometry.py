"""Room geometry models."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from owc_alloc.errors import GeometryError


@dataclass(frozen=True)
class Vec3:
    """A point in room coordinates (m) or a direction (unitless)."""

    x: float
    y: float
    z: float

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def of(cls, values: "np.ndarray | tuple[float, float, float]") -> "Vec3":
        x, y, z = (float(v) for v in values)
        return cls(x, y, z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def scaled(self, factor: float) -> "Vec3":
        return Vec3(self.x * factor, self.y * factor, self.z * factor)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        length = self.norm()
        if length == 0.0:
            raise GeometryError("cannot normalise a zero-length vector")
        return self.scaled(1.0 / length)


class Surface(Enum):
    """The six faces of a box room, named by the plane they lie in."""

    FLOOR = "floor"  # z = 0
    CEILING = "ceiling"  # z = height
    WALL_X0 = "wall_x0"  # x = 0
    WALL_X1 = "wall_x1"  # x = width
    WALL_Y0 = "wall_y0"  # y = 0
    WALL_Y1 = "wall_y1"  # y = length


@dataclass(frozen=True)
class Room:
    """An empty box room.

    Attributes:
        width_x: extent along x (m)
        length_y: extent along y (m)
        height_z: extent along z (m)
        reflectivity_walls_ceiling: diffuse reflection coefficient of walls and ceiling
        reflectivity_floor: diffuse reflection coefficient of the floor
        comm_floor_z: height of the communication floor (m)
    """

    width_x: float = 4.0
    length_y: float = 8.0
    height_z: float = 3.0
    reflectivity_walls_ceiling: float = 0.8
    reflectivity_floor: float = 0.3
    comm_floor_z: float = 1.0

    def __post_init__(self) -> None:
        for name in ("width_x", "length_y", "height_z"):
            if not getattr(self, name) > 0:
                raise GeometryError(f"room {name} must be > 0, got {getattr(self, name)}")
        for name in ("reflectivity_walls_ceiling", "reflectivity_floor"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise GeometryError(f"room {name} must lie in [0, 1], got {value}")
        if not 0.0 < self.comm_floor_z < self.height_z:
            raise GeometryError(
                f"comm_floor_z must lie in (0, {self.height_z}), got {self.comm_floor_z}"
            )

    @property
    def center(self) -> Vec3:
        return Vec3(self.width_x / 2, self.length_y / 2, self.height_z / 2)

    @property
    def surface_area(self) -> float:
        w, ln, h = self.width_x, self.length_y, self.height_z
        return 2.0 * (w * ln + w * h + ln * h)

    def reflectivity(self, surface: Surface) -> float:
        if surface is Surface.FLOOR:
            return self.reflectivity_floor
        return self.reflectivity_walls_ceiling

    def contains(self, point: Vec3) -> bool:
        return (
            0.0 <= point.x <= self.width_x
            and 0.0 <= point.y <= self.length_y
            and 0.0 <= point.z <= self.height_z
        )


@dataclass(frozen=True)
class SurfacePatch:
    """One discretised element of a room surface, re-emitting as a Lambertian source."""

    center: Vec3
    normal: Vec3
    area: float
    reflectivity: float
    lambertian_order: float = 1.0
    surface: Surface = Surface.FLOOR
