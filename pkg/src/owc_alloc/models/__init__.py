"""Shared data models and types."""

from owc_alloc.models.geometry import Room, Surface, SurfacePatch, Vec3
from owc_alloc.models.wavelength import ALL_WAVELENGTHS, Wavelength
from owc_alloc.models.channel import (
    LD_POWER_W,
    LDS_PER_UNIT,
    SPEED_OF_LIGHT,
    AccessPoint,
    GainTensor,
    ImpulseResponse,
    TraceConfig,
)
from owc_alloc.models.receiver import ADR, BRANCHES_PER_ADR, NoiseModel, ReceiverBranch
from owc_alloc.models.metrics import (
    EVALUATION_BIT_RATE_BPS,
    MIN_SINR_DB,
    SINR_THRESHOLD_DB,
    BandwidthEstimate,
    SinrReport,
    UserLinkReport,
)
from owc_alloc.models.allocation import AllocationProblem, Assignment, UserAssignment
from owc_alloc.models.run import RunManifest

__all__ = [
    # Geometry models
    "Vec3",
    "Room",
    "Surface",
    "SurfacePatch",
    # Wavelengths
    "Wavelength",
    "ALL_WAVELENGTHS",
    # Channel models
    "AccessPoint",
    "ImpulseResponse",
    "GainTensor",
    "TraceConfig",
    "LD_POWER_W",
    "LDS_PER_UNIT",
    "SPEED_OF_LIGHT",
    # Receiver models
    "ReceiverBranch",
    "ADR",
    "NoiseModel",
    "BRANCHES_PER_ADR",
    # Metric models
    "BandwidthEstimate",
    "UserLinkReport",
    "SinrReport",
    "SINR_THRESHOLD_DB",
    "EVALUATION_BIT_RATE_BPS",
    "MIN_SINR_DB",
    # Allocation models
    "AllocationProblem",
    "Assignment",
    "UserAssignment",
    # Run models
    "RunManifest",
]
