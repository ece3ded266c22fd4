"""Channel models: access points, impulse responses and the gain tensor."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from owc_alloc.config import LdLayout
from owc_alloc.errors import ChannelError
from owc_alloc.models.geometry import Vec3
from owc_alloc.models.wavelength import Wavelength

SPEED_OF_LIGHT = 299_792_458.0

LD_POWER_W: Dict[Wavelength, float] = {
    Wavelength.RED: 0.8,
    Wavelength.YELLOW: 0.5,
    Wavelength.GREEN: 0.3,
    Wavelength.BLUE: 0.3,
}
LDS_PER_UNIT = 12

# 3 x 4 grid for the twelve LDs of a unit
_GRID_SHAPE = (3, 4)
LD_GRID_PITCH_M = 0.0175


def unit_power(ld_power: Dict[Wavelength, float], lds_per_unit: int) -> Dict[Wavelength, float]:
    """Per-wavelength power of a light unit holding ``lds_per_unit`` RYGB LDs."""
    return {wavelength: lds_per_unit * power for wavelength, power in ld_power.items()}


@dataclass(frozen=True)
class AccessPoint:
    """A ceiling light unit.

    Attributes:
        ap_id: 1-based identifier
        position: unit centre (m)
        orientation: unit vector of the emission axis
        lambertian_order: emission order n (1 ⇔ 60° semi-angle)
        tx_power: optical power per wavelength for the whole unit (W)
        ld_layout: co-located point source or a grid of LDs; the grid is resolved
            on the direct path only
        ld_spacing: grid pitch (m) when ``ld_layout`` is GRID
    """

    ap_id: int
    position: Vec3
    orientation: Vec3 = Vec3(0.0, 0.0, -1.0)
    lambertian_order: float = 1.0
    tx_power: Dict[Wavelength, float] = field(
        default_factory=lambda: unit_power(LD_POWER_W, LDS_PER_UNIT)
    )
    ld_layout: LdLayout = LdLayout.COLOCATED
    ld_spacing: float = LD_GRID_PITCH_M

    def power(self, wavelength: Wavelength) -> float:
        return self.tx_power.get(wavelength, 0.0)

    def emitters(self) -> List[Tuple[Vec3, float]]:
        """Emitter positions with the fraction of unit power each carries."""
        if self.ld_layout is LdLayout.COLOCATED:
            return [(self.position, 1.0)]
        rows, cols = _GRID_SHAPE
        weight = 1.0 / (rows * cols)
        points = []
        for i in range(rows):
            for j in range(cols):
                dx = (i - (rows - 1) / 2) * self.ld_spacing
                dy = (j - (cols - 1) / 2) * self.ld_spacing
                points.append((self.position + Vec3(dx, dy, 0.0), weight))
        return points


@dataclass
class ImpulseResponse:
    """Time-binned received power per unit transmitted power.

    ``bins[k]`` holds the gain arriving in ``[t0 + k·bin_width, t0 + (k+1)·bin_width)``.
    """

    bin_width: float
    t0: float
    bins: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        self.bins = np.asarray(self.bins, dtype=float)
        if self.bin_width <= 0:
            raise ChannelError(f"bin width must be positive, got {self.bin_width}")
        if self.bins.size and float(self.bins.min()) < 0.0:
            raise ChannelError("impulse response bins must be non-negative")

    @property
    def dc_gain(self) -> float:
        return float(np.sum(self.bins))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.bin_width * np.arange(self.bins.size)

    @classmethod
    def zero(cls, t0: float, bin_width: float) -> "ImpulseResponse":
        return cls(bin_width=bin_width, t0=t0, bins=np.zeros(0))

    @classmethod
    def from_arrivals(
        cls, delays: np.ndarray, gains: np.ndarray, t0: float, bin_width: float
    ) -> "ImpulseResponse":
        """Histogram ``gains`` arriving at ``delays`` into bins starting at ``t0``."""
        gains = np.asarray(gains, dtype=float).ravel()
        delays = np.asarray(delays, dtype=float).ravel()
        keep = gains > 0.0
        if not np.any(keep):
            return cls.zero(t0, bin_width)
        index = np.floor((delays[keep] - t0) / bin_width).astype(np.int64)
        # arrivals at t0 may land at -1 through rounding
        index = np.maximum(index, 0)
        bins = np.bincount(index, weights=gains[keep], minlength=int(index.max()) + 1)
        return cls(bin_width=bin_width, t0=t0, bins=bins)

    def __add__(self, other: "ImpulseResponse") -> "ImpulseResponse":
        if self.bin_width != other.bin_width or self.t0 != other.t0:
            raise ChannelError("cannot add impulse responses with different binning")
        size = max(self.bins.size, other.bins.size)
        total = np.zeros(size)
        total[: self.bins.size] += self.bins
        total[: other.bins.size] += other.bins
        return ImpulseResponse(bin_width=self.bin_width, t0=self.t0, bins=total)


@dataclass(frozen=True)
class TraceConfig:
    """What the ray tracer computes and at which resolution."""

    bin_width_s: float = 1e-11
    orders: Tuple[str, ...] = ("los", "first", "second")
    fine_element_m: float = 0.05
    coarse_element_m: float = 0.20
    keep_responses: bool = False

    def includes(self, order: str) -> bool:
        return order in self.orders


@dataclass
class GainTensor:
    """DC channel gains indexed ``[user, branch, ap]`` (0-based array axes).

    Attributes:
        dc_gain: array of shape (users, branches, aps)
        ap_ids: access point id for each ap axis entry
        bandwidth_hz: optional 3-dB optical bandwidth of each link, NaN when the link is dark
        bandwidth_lower_bound: True where no 3-dB crossing exists below Nyquist
        impulse_responses: optional ``(user, branch, ap)`` → response (0-based indices)
        order_dc_gain: optional per-order DC gains (``los``, ``first``, ``second``)
    """

    dc_gain: np.ndarray
    ap_ids: Tuple[int, ...]
    bandwidth_hz: Optional[np.ndarray] = None
    bandwidth_lower_bound: Optional[np.ndarray] = None
    impulse_responses: Optional[Dict[Tuple[int, int, int], ImpulseResponse]] = None
    order_dc_gain: Optional[Dict[str, np.ndarray]] = None

    def __post_init__(self) -> None:
        self.dc_gain = np.asarray(self.dc_gain, dtype=float)
        if self.dc_gain.ndim != 3:
            raise ChannelError(f"gain tensor must be 3-D, got shape {self.dc_gain.shape}")
        if self.dc_gain.shape[2] != len(self.ap_ids):
            raise ChannelError("gain tensor ap axis does not match ap_ids")
        if np.any(self.dc_gain < 0):
            raise ChannelError("gain tensor entries must be non-negative")

    @property
    def n_users(self) -> int:
        return int(self.dc_gain.shape[0])

    @property
    def n_branches(self) -> int:
        return int(self.dc_gain.shape[1])

    @property
    def n_aps(self) -> int:
        return int(self.dc_gain.shape[2])

    def ap_index(self, ap_id: int) -> int:
        return self.ap_ids.index(ap_id)

    def gain(self, user: int, branch_id: int, ap_id: int) -> float:
        return float(self.dc_gain[user, branch_id - 1, self.ap_index(ap_id)])
