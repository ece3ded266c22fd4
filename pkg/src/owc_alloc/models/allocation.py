"""Allocation problem and assignment models."""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from owc_alloc.config import ObjectiveMode
from owc_alloc.models.channel import AccessPoint, GainTensor
from owc_alloc.models.geometry import Vec3
from owc_alloc.models.receiver import NoiseModel
from owc_alloc.models.wavelength import ALL_WAVELENGTHS, Wavelength


@dataclass(frozen=True)
class UserAssignment:
    """The (access point, wavelength, branch) triple serving one user."""

    ap_id: int
    wavelength: Wavelength
    branch_id: int

    def key(self) -> Tuple[int, int, int]:
        return (self.ap_id, self.wavelength.index, self.branch_id)


@dataclass(frozen=True)
class Assignment:
    """One triple per user plus the objective value it achieves."""

    users: Tuple[UserAssignment, ...]
    objective_value: float = float("nan")
    objective: ObjectiveMode = ObjectiveMode.SUM_LINEAR

    def __len__(self) -> int:
        return len(self.users)

    def __getitem__(self, user: int) -> UserAssignment:
        return self.users[user]

    def key(self) -> Tuple[int, ...]:
        """Flattened tie-break vector (ap_id, wavelength index, branch_id) per user."""
        return tuple(value for triple in self.users for value in triple.key())

    @classmethod
    def from_triples(
        cls,
        triples: Sequence[Tuple[int, "Wavelength | str", int]],
        objective_value: float = float("nan"),
        objective: ObjectiveMode = ObjectiveMode.SUM_LINEAR,
    ) -> "Assignment":
        users = tuple(
            UserAssignment(int(ap), Wavelength.parse(wavelength), int(branch))
            for ap, wavelength, branch in triples
        )
        return cls(users=users, objective_value=objective_value, objective=objective)


@dataclass
class AllocationProblem:
    """Everything the allocator needs: gains, powers, noise and the objective.

    Attributes:
        gains: DC gains of shape (users, branches, aps)
        ap_ids: access point id for each ap axis entry
        tx_power: optical power of shape (aps, wavelengths), W
        wavelengths: wavelength set in canonical R, Y, G, B order
        noise: receiver noise model
        objective: sum of linear SINRs or sum of SINRs in dB
        user_positions: optional user locations for labelling
    """

    gains: np.ndarray
    ap_ids: Tuple[int, ...]
    tx_power: np.ndarray
    wavelengths: Tuple[Wavelength, ...] = ALL_WAVELENGTHS
    noise: NoiseModel = field(default_factory=NoiseModel)
    objective: ObjectiveMode = ObjectiveMode.SUM_LINEAR
    user_positions: Optional[Tuple[Vec3, ...]] = None

    def __post_init__(self) -> None:
        self.gains = np.asarray(self.gains, dtype=float)
        self.tx_power = np.asarray(self.tx_power, dtype=float)
        if not self.wavelengths:
            raise ValueError("allocation problem needs at least one wavelength")
        self.wavelengths = tuple(sorted(set(self.wavelengths), key=lambda w: w.index))
        if self.gains.ndim != 3 or self.gains.shape[2] != len(self.ap_ids):
            raise ValueError(
                f"gains shape {self.gains.shape} does not match {len(self.ap_ids)} access points"
            )
        if self.tx_power.shape != (len(self.ap_ids), len(self.wavelengths)):
            raise ValueError(
                f"tx_power shape {self.tx_power.shape} must be "
                f"({len(self.ap_ids)}, {len(self.wavelengths)})"
            )
        if np.any(self.gains < 0) or np.any(self.tx_power < 0):
            raise ValueError("gains and powers must be non-negative")

    @property
    def n_users(self) -> int:
        return int(self.gains.shape[0])

    @property
    def n_branches(self) -> int:
        return int(self.gains.shape[1])

    @property
    def n_aps(self) -> int:
        return len(self.ap_ids)

    @property
    def n_wavelengths(self) -> int:
        return len(self.wavelengths)

    @classmethod
    def from_tensor(
        cls,
        tensor: GainTensor,
        aps: Sequence[AccessPoint],
        noise: NoiseModel,
        wavelengths: Sequence[Wavelength] = ALL_WAVELENGTHS,
        objective: ObjectiveMode = ObjectiveMode.SUM_LINEAR,
        user_positions: Optional[Sequence[Vec3]] = None,
    ) -> "AllocationProblem":
        by_id = {ap.ap_id: ap for ap in aps}
        ordered = sorted(set(wavelengths), key=lambda w: w.index)
        power = np.array([[by_id[ap_id].power(w) for w in ordered] for ap_id in tensor.ap_ids])
        return cls(
            gains=tensor.dc_gain,
            ap_ids=tuple(tensor.ap_ids),
            tx_power=power,
            wavelengths=tuple(ordered),
            noise=noise,
            objective=objective,
            user_positions=tuple(user_positions) if user_positions is not None else None,
        )
