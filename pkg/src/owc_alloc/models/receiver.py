"""Angle diversity receiver and noise models."""

from dataclasses import dataclass, field
from typing import Dict, Tuple

from scipy import constants

from owc_alloc.models.geometry import Vec3
from owc_alloc.models.wavelength import Wavelength

BRANCHES_PER_ADR = 4


@dataclass(frozen=True)
class ReceiverBranch:
    """One photodetector of an angle diversity receiver.

    Attributes:
        branch_id: 1-based detector number
        position: detector location (m)
        normal: unit vector the detector faces
        azimuth_deg: azimuth the normal was built from
        elevation_deg: elevation the normal was built from
        fov_deg: field of view (half-angle, hard cutoff)
        area: photodetector area (m²)
    """

    branch_id: int
    position: Vec3
    normal: Vec3
    azimuth_deg: float
    elevation_deg: float
    fov_deg: float = 25.0
    area: float = 20e-6


@dataclass(frozen=True)
class ADR:
    """A four-branch angle diversity receiver at one user location."""

    position: Vec3
    branches: Tuple[ReceiverBranch, ...]
    system_id: int = 1
    azimuth_offset_deg: float = 0.0

    def branch(self, branch_id: int) -> ReceiverBranch:
        return self.branches[branch_id - 1]


def _table_responsivities() -> Dict[Wavelength, float]:
    return {
        Wavelength.RED: 0.4,
        Wavelength.YELLOW: 0.35,
        Wavelength.GREEN: 0.3,
        Wavelength.BLUE: 0.2,
    }


@dataclass(frozen=True)
class NoiseModel:
    """Receiver noise parameters.

    Attributes:
        preamp_current_density: preamplifier noise current density (A/√Hz)
        rx_bandwidth: receiver noise bandwidth (Hz)
        responsivity: photodetector responsivity per wavelength (A/W)
        electron_charge: elementary charge (C)
    """

    preamp_current_density: float = 4.47e-12
    rx_bandwidth: float = 4e9
    responsivity: Dict[Wavelength, float] = field(default_factory=_table_responsivities)
    electron_charge: float = constants.e

    def __post_init__(self) -> None:
        if self.preamp_current_density <= 0 or self.rx_bandwidth <= 0:
            raise ValueError("noise density and bandwidth must be positive")
        if any(value <= 0 for value in self.responsivity.values()):
            raise ValueError("responsivities must be positive")

    @classmethod
    def for_bit_rate(cls, bit_rate_bps: float, **overrides: object) -> "NoiseModel":
        """Noise model whose bandwidth is 0.7 × the OOK bit rate."""
        if bit_rate_bps <= 0:
            raise ValueError(f"bit rate must be positive, got {bit_rate_bps}")
        return cls(rx_bandwidth=0.7 * bit_rate_bps, **overrides)  # type: ignore[arg-type]

    @property
    def preamp_variance(self) -> float:
        return self.preamp_current_density**2 * self.rx_bandwidth

    def responsivity_of(self, wavelength: Wavelength) -> float:
        return self.responsivity[wavelength]
