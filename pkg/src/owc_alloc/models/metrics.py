"""Link metric models."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from owc_alloc.config import ObjectiveMode
from owc_alloc.models.wavelength import Wavelength

SINR_THRESHOLD_DB = 15.6
EVALUATION_BIT_RATE_BPS = 5.7e9

# dB value reported for a link with zero SINR
MIN_SINR_DB = -300.0


def to_db(value: float) -> float:
    if value <= 0.0:
        return MIN_SINR_DB
    return max(10.0 * math.log10(value), MIN_SINR_DB)


@dataclass(frozen=True)
class BandwidthEstimate:
    """3-dB optical channel bandwidth.

    Attributes:
        hz: bandwidth in Hz
        lower_bound: True when the response never fell 3 dB below Nyquist
    """

    hz: float
    lower_bound: bool = False


@dataclass
class UserLinkReport:
    """Metrics of one user's assigned link."""

    user: int
    ap_id: int
    wavelength: Wavelength
    branch_id: int
    sinr_linear: float
    sinr_db: float
    ber: float
    signal_power_w: float
    noise_variance_a2: float
    interference_powers_w: Dict[int, float] = field(default_factory=dict)
    channel_bandwidth_hz: Optional[float] = None
    bandwidth_lower_bound: bool = False

    @property
    def passes_threshold(self) -> bool:
        return self.sinr_db >= SINR_THRESHOLD_DB


@dataclass
class SinrReport:
    """Per-user link metrics for one assignment."""

    users: List[UserLinkReport]
    objective_linear: float
    objective_db: float

    @property
    def min_sinr_db(self) -> float:
        return min(user.sinr_db for user in self.users)

    @property
    def all_pass(self) -> bool:
        return all(user.passes_threshold for user in self.users)

    def objective_value(self, mode: ObjectiveMode) -> float:
        if mode == ObjectiveMode.SUM_DB:
            return self.objective_db
        return self.objective_linear
