"""Exception hierarchy shared by the library and the command line."""

from typing import Sequence, Tuple


class OwcAllocError(Exception):
    """Base class for all errors raised by owc_alloc."""


class GeometryError(OwcAllocError, ValueError):
    """Invalid room, angle, distance or element size."""


class ChannelError(OwcAllocError, ValueError):
    """Invalid impulse response input (all-zero response, mismatched binning)."""


class ConfigError(OwcAllocError, ValueError):
    """Scenario document failed validation.

    Attributes:
        problems: ``(field_path, message)`` pairs, one per violation
    """

    def __init__(self, problems: Sequence[Tuple[str, str]]):
        self.problems = list(problems)
        lines = [f"{path}: {message}" for path, message in self.problems]
        super().__init__("invalid scenario configuration:\n  " + "\n  ".join(lines))


class AllocationError(OwcAllocError):
    """Base class for allocation failures."""


class InfeasibleAllocationError(AllocationError):
    """More users than (access point, wavelength) slots."""


class FeasibilityError(AllocationError, ValueError):
    """An assignment violates the allocation constraints."""


class InstanceTooLargeError(AllocationError):
    """Exhaustive enumeration refused.

    Attributes:
        estimate: number of joint assignments the enumeration would visit
    """

    def __init__(self, estimate: int, limit: int):
        self.estimate = estimate
        self.limit = limit
        super().__init__(
            f"exhaustive search would enumerate {estimate:.3e} joint assignments "
            f"(limit {limit:.0e})"
        )


class ReportError(OwcAllocError):
    """Report inputs are missing or unreadable."""
