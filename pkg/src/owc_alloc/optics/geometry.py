"""Room discretisation, orientation conversion and the Lambertian hop gain.

The patch grid is held as parallel numpy arrays (struct of arrays). It also
behaves as a sequence of :class:`SurfacePatch` for callers that want individual
elements.
"""

import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple, overload

import numpy as np

from owc_alloc.errors import GeometryError
from owc_alloc.models.geometry import Room, Surface, SurfacePatch, Vec3

_SURFACES: Tuple[Surface, ...] = tuple(Surface)

# relative tolerance when checking that an element edge tiles a dimension
_TILE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class PatchGrid(Sequence[SurfacePatch]):
    """Discretised room surfaces.

    Attributes:
        centers: (N, 3) patch centres (m)
        normals: (N, 3) unit normals pointing into the room
        areas: (N,) patch areas (m²)
        reflectivity: (N,) reflection coefficients
        surface_index: (N,) index into ``Surface`` declaration order
        element_edge: nominal edge length the grid was built with (m)
    """

    centers: np.ndarray
    normals: np.ndarray
    areas: np.ndarray
    reflectivity: np.ndarray
    surface_index: np.ndarray
    element_edge: float = 0.0

    def __len__(self) -> int:
        return int(self.areas.shape[0])

    @overload
    def __getitem__(self, index: int) -> SurfacePatch: ...

    @overload
    def __getitem__(self, index: slice) -> List[SurfacePatch]: ...

    def __getitem__(self, index):  # type: ignore[no-untyped-def]
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if index < 0:
            index += len(self)
        return SurfacePatch(
            center=Vec3.of(self.centers[index]),
            normal=Vec3.of(self.normals[index]),
            area=float(self.areas[index]),
            reflectivity=float(self.reflectivity[index]),
            lambertian_order=1.0,
            surface=_SURFACES[int(self.surface_index[index])],
        )

    def __iter__(self) -> Iterator[SurfacePatch]:
        for i in range(len(self)):
            yield self[i]

    @property
    def total_area(self) -> float:
        return float(np.sum(self.areas))

    @classmethod
    def from_patches(cls, patches: Sequence[SurfacePatch]) -> "PatchGrid":
        """Build a grid from explicit patches (toy rooms, tests)."""
        for patch in patches:
            if patch.area <= 0:
                raise GeometryError(f"patch area must be positive, got {patch.area}")
        return cls(
            centers=np.array([p.center.array for p in patches], dtype=float).reshape(-1, 3),
            normals=np.array([p.normal.normalized().array for p in patches]).reshape(-1, 3),
            areas=np.array([p.area for p in patches], dtype=float),
            reflectivity=np.array([p.reflectivity for p in patches], dtype=float),
            surface_index=np.array([_SURFACES.index(p.surface) for p in patches], dtype=int),
        )


def _tiles(dimension: float, edge: float, name: str) -> int:
    count = int(round(dimension / edge))
    if count < 1 or abs(count * edge - dimension) > _TILE_RTOL * max(dimension, 1.0):
        raise GeometryError(
            f"element edge {edge} m does not divide room {name} = {dimension} m"
        )
    return count


def _surface_layout() -> List[Tuple[Surface, str, str]]:
    # (surface, name of first in-plane dimension, name of second)
    return [
        (Surface.FLOOR, "width_x", "length_y"),
        (Surface.CEILING, "width_x", "length_y"),
        (Surface.WALL_X0, "length_y", "height_z"),
        (Surface.WALL_X1, "length_y", "height_z"),
        (Surface.WALL_Y0, "width_x", "height_z"),
        (Surface.WALL_Y1, "width_x", "height_z"),
    ]


def _place(
    surface: Surface, room: Room, u: np.ndarray, v: np.ndarray
) -> Tuple[np.ndarray, Tuple[float, float, float]]:
    w, ln, h = room.width_x, room.length_y, room.height_z
    zeros = np.zeros_like(u)
    if surface is Surface.FLOOR:
        return np.stack([u, v, zeros], axis=1), (0.0, 0.0, 1.0)
    if surface is Surface.CEILING:
        return np.stack([u, v, zeros + h], axis=1), (0.0, 0.0, -1.0)
    if surface is Surface.WALL_X0:
        return np.stack([zeros, u, v], axis=1), (1.0, 0.0, 0.0)
    if surface is Surface.WALL_X1:
        return np.stack([zeros + w, u, v], axis=1), (-1.0, 0.0, 0.0)
    if surface is Surface.WALL_Y0:
        return np.stack([u, zeros, v], axis=1), (0.0, 1.0, 0.0)
    return np.stack([u, zeros + ln, v], axis=1), (0.0, -1.0, 0.0)


def discretize(room: Room, element_edge: float) -> PatchGrid:
    """Tile all six room surfaces with square elements of edge ``element_edge``.

    Patches are ordered surface by surface (floor, ceiling, x walls, y walls) and
    row-major within each surface. Each patch is represented by its centre.

    Raises:
        GeometryError: if the edge is not positive or does not divide a room dimension
    """
    if not element_edge > 0:
        raise GeometryError(f"element edge must be > 0, got {element_edge}")

    centers, normals, areas, rho, index = [], [], [], [], []
    for surface, first, second in _surface_layout():
        dim_u, dim_v = getattr(room, first), getattr(room, second)
        n_u = _tiles(dim_u, element_edge, first)
        n_v = _tiles(dim_v, element_edge, second)
        step_u, step_v = dim_u / n_u, dim_v / n_v
        uu, vv = np.meshgrid(
            (np.arange(n_u) + 0.5) * step_u, (np.arange(n_v) + 0.5) * step_v, indexing="ij"
        )
        points, normal = _place(surface, room, uu.ravel(), vv.ravel())
        count = points.shape[0]
        centers.append(points)
        normals.append(np.tile(normal, (count, 1)))
        areas.append(np.full(count, step_u * step_v))
        rho.append(np.full(count, room.reflectivity(surface)))
        index.append(np.full(count, _SURFACES.index(surface), dtype=int))

    return PatchGrid(
        centers=np.concatenate(centers),
        normals=np.concatenate(normals).astype(float),
        areas=np.concatenate(areas),
        reflectivity=np.concatenate(rho),
        surface_index=np.concatenate(index),
        element_edge=float(element_edge),
    )


def az_el_to_normal(azimuth: float, elevation: float) -> Vec3:
    """Unit vector for an azimuth/elevation pair in degrees.

    Elevation is measured up from the horizontal plane (90° is the zenith);
    azimuth is measured from +x towards +y.
    """
    if not 0.0 <= azimuth < 360.0:
        raise GeometryError(f"azimuth must lie in [0, 360), got {azimuth}")
    if not 0.0 <= elevation <= 90.0:
        raise GeometryError(f"elevation must lie in [0, 90], got {elevation}")
    az, el = math.radians(azimuth), math.radians(elevation)
    return Vec3(math.cos(el) * math.cos(az), math.cos(el) * math.sin(az), math.sin(el))


def lambertian_gain(
    order: float, d: float, cos_emit: float, cos_incid: float, area_rx: float
) -> float:
    """Received over transmitted power for one Lambertian hop.

    (n + 1) / (2π d²) · cos_emitⁿ · cos_incid · area_rx
    """
    if not d > 0:
        raise GeometryError(f"hop distance must be > 0 (coincident points), got {d}")
    if not 0.0 <= cos_emit <= 1.0 or not 0.0 <= cos_incid <= 1.0:
        raise GeometryError(
            f"cosines must lie in [0, 1], got cos_emit={cos_emit}, cos_incid={cos_incid}"
        )
    if not area_rx > 0:
        raise GeometryError(f"receiver area must be > 0, got {area_rx}")
    return (order + 1.0) / (2.0 * math.pi * d * d) * cos_emit**order * cos_incid * area_rx


def lambertian_gain_array(
    order: float,
    d: np.ndarray,
    cos_emit: np.ndarray,
    cos_incid: np.ndarray,
    area_rx: "np.ndarray | float",
) -> np.ndarray:
    """Vectorised :func:`lambertian_gain`; back-facing or coincident pairs give 0."""
    d = np.asarray(d, dtype=float)
    visible = (cos_emit > 0.0) & (cos_incid > 0.0) & (d > 0.0)
    safe_d = np.where(visible, d, 1.0)
    emit = np.where(visible, cos_emit, 0.0)
    incid = np.where(visible, cos_incid, 0.0)
    return (order + 1.0) / (2.0 * np.pi * safe_d**2) * emit**order * incid * area_rx


def hop_geometry(
    sources: np.ndarray, targets: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Distances and unit directions from ``sources`` to ``targets`` (broadcasting)."""
    delta = targets - sources
    dist = np.linalg.norm(delta, axis=-1)
    safe = np.where(dist > 0.0, dist, 1.0)
    return dist, delta / safe[..., None]
