"""Per-user link metrics: SINR, 3-dB channel bandwidth and OOK bit error rate."""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
import structlog
from scipy import fft, special

from owc_alloc.errors import ChannelError, FeasibilityError
from owc_alloc.models.allocation import Assignment
from owc_alloc.models.channel import AccessPoint, GainTensor, ImpulseResponse
from owc_alloc.models.metrics import BandwidthEstimate, SinrReport, UserLinkReport, to_db
from owc_alloc.models.receiver import NoiseModel
from owc_alloc.models.wavelength import Wavelength
from owc_alloc.optics.receiver import noise_variance

logger = structlog.get_logger(__name__)

# frequency grid resolution for the bandwidth search
FREQUENCY_RESOLUTION_HZ = 10e6

# (ap_id, wavelength) -> transmitted optical power (W)
PowerLookup = Callable[[int, Wavelength], float]


def sinr_from_currents(
    signal_current: float, interferer_currents: Iterable[float], noise_var: float
) -> float:
    """Electrical SINR: S² / (σ² + Σ I²)."""
    interference = sum(current * current for current in interferer_currents)
    return signal_current * signal_current / (noise_var + interference)


def received_total(
    gains: Sequence[float], ap_ids: Sequence[int], power: PowerLookup, wavelength: Wavelength
) -> float:
    """Optical power at one wavelength reaching a branch from every access point."""
    return sum(power(ap_id, wavelength) * gains[i] for i, ap_id in enumerate(ap_ids))


@dataclass(frozen=True)
class LinkTerms:
    """Photocurrents and noise making up one user's SINR."""

    signal_current: float
    interferer_currents: Dict[int, float]
    noise_var: float
    signal_power: float
    interference_powers: Dict[int, float]

    @property
    def sinr(self) -> float:
        return sinr_from_currents(
            self.signal_current, self.interferer_currents.values(), self.noise_var
        )


def link_terms(
    user: int,
    assignment: Assignment,
    gains: np.ndarray,
    ap_ids: Sequence[int],
    power: PowerLookup,
    noise: NoiseModel,
) -> LinkTerms:
    """Signal, interference and noise of ``user`` (0-based).

    Interference comes from every other user sharing the wavelength on a
    different access point. Shot noise counts all light at the wavelength that
    reaches the user's branch, modulated for someone else or not.
    """
    n_users = gains.shape[0]
    if len(assignment) != n_users:
        raise FeasibilityError(f"assignment covers {len(assignment)} users, gains have {n_users}")
    if not 0 <= user < n_users:
        raise FeasibilityError(f"user {user + 1} has no assignment")

    own = assignment[user]
    wavelength = own.wavelength
    responsivity = noise.responsivity_of(wavelength)
    row = gains[user, own.branch_id - 1].tolist()

    def received(ap_id: int) -> float:
        return power(ap_id, wavelength) * row[ap_ids.index(ap_id)]

    interference: Dict[int, float] = {}
    for other_user, other in enumerate(assignment.users):
        if other_user == user or other.wavelength is not wavelength:
            continue
        if other.ap_id == own.ap_id:
            continue
        interference[other.ap_id] = interference.get(other.ap_id, 0.0) + received(other.ap_id)

    signal = received(own.ap_id)
    total = received_total(row, ap_ids, power, wavelength)
    return LinkTerms(
        signal_current=responsivity * signal,
        interferer_currents={ap_id: responsivity * p for ap_id, p in interference.items()},
        noise_var=noise_variance(total, noise, wavelength),
        signal_power=signal,
        interference_powers=interference,
    )


def _tensor_power(tensor: GainTensor, aps: Sequence[AccessPoint]) -> PowerLookup:
    by_id = {ap.ap_id: ap for ap in aps}
    missing = [ap_id for ap_id in tensor.ap_ids if ap_id not in by_id]
    if missing:
        raise ValueError(f"no access point definition for ids {missing}")
    return lambda ap_id, wavelength: by_id[ap_id].power(wavelength)


def sinr(
    user: int,
    assignment: Assignment,
    tensor: GainTensor,
    aps: Sequence[AccessPoint],
    noise: NoiseModel,
) -> float:
    """Linear SINR of ``user`` (0-based) under ``assignment``."""
    power = _tensor_power(tensor, aps)
    return link_terms(user, assignment, tensor.dc_gain, tensor.ap_ids, power, noise).sinr


def channel_bandwidth(ir: ImpulseResponse) -> BandwidthEstimate:
    """Optical 3-dB bandwidth of a binned impulse response.

    ``h(t)`` maps optical power to optical power, so the optical 3-dB point is
    where |H(f)| halves. The response is zero-padded to a power of two long
    enough for a frequency step of at most 10 MHz. The first drop of |H(f)| to
    |H(0)|/2 is located by linear interpolation between neighbouring grid
    points. A response that stays above that level up to Nyquist returns
    Nyquist flagged as a bound.
    """
    bins = np.asarray(ir.bins, dtype=float)
    if bins.size == 0 or not np.any(bins > 0.0):
        raise ChannelError("cannot estimate the bandwidth of an all-zero impulse response")

    needed = max(bins.size, math.ceil(1.0 / (ir.bin_width * FREQUENCY_RESOLUTION_HZ)))
    n = 1 << (needed - 1).bit_length()
    spectrum = np.abs(fft.rfft(bins, n))
    freqs = fft.rfftfreq(n, d=ir.bin_width)
    target = spectrum[0] / 2.0

    below = np.flatnonzero(spectrum[1:] <= target)
    if below.size == 0:
        return BandwidthEstimate(hz=1.0 / (2.0 * ir.bin_width), lower_bound=True)
    k = int(below[0]) + 1
    upper, lower = spectrum[k - 1], spectrum[k]
    fraction = (upper - target) / (upper - lower) if upper > lower else 0.0
    hz = freqs[k - 1] + fraction * (freqs[k] - freqs[k - 1])
    return BandwidthEstimate(hz=float(hz), lower_bound=False)


def ber_ook(sinr_linear: float) -> float:
    """OOK bit error rate Q(√SINR)."""
    if sinr_linear < 0:
        raise ValueError(f"SINR must be >= 0, got {sinr_linear}")
    return float(0.5 * special.erfc(math.sqrt(sinr_linear) / math.sqrt(2.0)))


def build_report(
    assignment: Assignment,
    gains: np.ndarray,
    ap_ids: Sequence[int],
    power: PowerLookup,
    noise: NoiseModel,
    bandwidth_hz: Optional[np.ndarray] = None,
    bandwidth_lower_bound: Optional[np.ndarray] = None,
) -> SinrReport:
    """Metrics for every user of ``assignment`` plus both objective values."""
    users: List[UserLinkReport] = []
    for user, triple in enumerate(assignment.users):
        terms = link_terms(user, assignment, gains, ap_ids, power, noise)
        value = terms.sinr
        bandwidth = None
        lower_bound = False
        index = (user, triple.branch_id - 1, list(ap_ids).index(triple.ap_id))
        if bandwidth_hz is not None and not math.isnan(bandwidth_hz[index]):
            bandwidth = float(bandwidth_hz[index])
            if bandwidth_lower_bound is not None:
                lower_bound = bool(bandwidth_lower_bound[index])
        users.append(
            UserLinkReport(
                user=user + 1,
                ap_id=triple.ap_id,
                wavelength=triple.wavelength,
                branch_id=triple.branch_id,
                sinr_linear=value,
                sinr_db=to_db(value),
                ber=ber_ook(value),
                signal_power_w=terms.signal_power,
                noise_variance_a2=terms.noise_var,
                interference_powers_w=dict(sorted(terms.interference_powers.items())),
                channel_bandwidth_hz=bandwidth,
                bandwidth_lower_bound=lower_bound,
            )
        )
    report = SinrReport(
        users=users,
        objective_linear=sum(link.sinr_linear for link in users),
        objective_db=sum(link.sinr_db for link in users),
    )
    logger.debug(
        "sinr_report_built",
        users=len(users),
        min_sinr_db=round(report.min_sinr_db, 3) if users else None,
    )
    return report


def sinr_report(
    assignment: Assignment,
    tensor: GainTensor,
    aps: Sequence[AccessPoint],
    noise: NoiseModel,
) -> SinrReport:
    """Per-user metrics of ``assignment`` on a traced gain tensor."""
    return build_report(
        assignment,
        tensor.dc_gain,
        tensor.ap_ids,
        _tensor_power(tensor, aps),
        noise,
        bandwidth_hz=tensor.bandwidth_hz,
        bandwidth_lower_bound=tensor.bandwidth_lower_bound,
    )
