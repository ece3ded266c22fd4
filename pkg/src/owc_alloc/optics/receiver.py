"""Angle diversity receiver construction and the receiver noise model."""

from typing import Tuple

from owc_alloc.errors import GeometryError
from owc_alloc.models.geometry import Vec3
from owc_alloc.models.receiver import ADR, BRANCHES_PER_ADR, NoiseModel, ReceiverBranch
from owc_alloc.models.wavelength import Wavelength
from owc_alloc.optics.geometry import az_el_to_normal

BASE_AZIMUTHS_DEG: Tuple[float, ...] = (0.0, 90.0, 180.0, 270.0)
SYSTEM_STEP_DEG = 30.0
SYSTEM_IDS = (1, 2, 3)
BRANCH_ELEVATION_DEG = 60.0
BRANCH_FOV_DEG = 25.0
PHOTODETECTOR_AREA_M2 = 20e-6


def system_offset(system_id: int) -> float:
    """Azimuth offset of an orientation system (System 1 → 0°, 2 → 30°, 3 → 60°)."""
    if system_id not in SYSTEM_IDS:
        raise GeometryError(f"system_id must be one of {SYSTEM_IDS}, got {system_id}")
    return SYSTEM_STEP_DEG * (system_id - 1)


def build_adr_with_offset(
    user_position: Vec3,
    azimuth_offset_deg: float,
    *,
    elevation_deg: float = BRANCH_ELEVATION_DEG,
    fov_deg: float = BRANCH_FOV_DEG,
    area_m2: float = PHOTODETECTOR_AREA_M2,
    system_id: int = 0,
) -> ADR:
    """Four co-located branches at azimuths {0, 90, 180, 270} + offset."""
    if not 0.0 < fov_deg <= 90.0:
        raise GeometryError(f"fov must lie in (0, 90], got {fov_deg}")
    if not area_m2 > 0:
        raise GeometryError(f"photodetector area must be > 0, got {area_m2}")
    branches = []
    for i, base in enumerate(BASE_AZIMUTHS_DEG[:BRANCHES_PER_ADR]):
        azimuth = (base + azimuth_offset_deg) % 360.0
        branches.append(
            ReceiverBranch(
                branch_id=i + 1,
                position=user_position,
                normal=az_el_to_normal(azimuth, elevation_deg),
                azimuth_deg=azimuth,
                elevation_deg=elevation_deg,
                fov_deg=fov_deg,
                area=area_m2,
            )
        )
    return ADR(
        position=user_position,
        branches=tuple(branches),
        system_id=system_id,
        azimuth_offset_deg=azimuth_offset_deg % 360.0,
    )


def build_adr(
    user_position: Vec3,
    system_id: int,
    *,
    elevation_deg: float = BRANCH_ELEVATION_DEG,
    fov_deg: float = BRANCH_FOV_DEG,
    area_m2: float = PHOTODETECTOR_AREA_M2,
) -> ADR:
    """ADR for one of the three orientation systems."""
    return build_adr_with_offset(
        user_position,
        system_offset(system_id),
        elevation_deg=elevation_deg,
        fov_deg=fov_deg,
        area_m2=area_m2,
        system_id=system_id,
    )


def noise_variance(total_power_w: float, model: NoiseModel, wavelength: Wavelength) -> float:
    """Preamplifier plus shot noise variance (A²).

    Shot noise is driven by all optical power received at the wavelength, whether
    it carries the desired signal, an interfering signal or unmodulated light.
    """
    if total_power_w < 0:
        raise ValueError(f"received optical power must be >= 0, got {total_power_w}")
    shot = (
        2.0
        * model.electron_charge
        * model.responsivity_of(wavelength)
        * total_power_w
        * model.rx_bandwidth
    )
    return model.preamp_variance + shot
