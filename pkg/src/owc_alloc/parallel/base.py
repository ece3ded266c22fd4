"""Execution backend abstraction layer.

Channel tracing splits into independent (user, branch) tasks. Backends run those
tasks either inline or on a pool of worker threads; either way ``gather`` returns
results in submission order, so the assembled gain tensor does not depend on the
backend or on the thread count.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, List


@dataclass
class Task:
    """A unit of work submitted to a backend.

    Attributes:
        id: Submission sequence number; results are returned in this order
        label: Human-readable name used in logs
        func_name: Name of the function to execute
        args: Positional arguments for the function
        kwargs: Keyword arguments for the function
    """

    id: int
    label: str
    func_name: str
    args: tuple
    kwargs: dict = field(default_factory=dict)


class ExecutionBackend(ABC):
    """Abstract base class for execution backends.

    Implementations must return results of ``gather`` ordered by task id and
    must re-raise the failure of the lowest-numbered failing task.
    """

    @abstractmethod
    def submit(self, label: str, func: Callable[..., Any], *args: Any, **kwargs: Any) -> Task:
        """Submit a task for execution.

        Args:
            label: Name for logging
            func: The function to execute
            *args: Positional arguments to pass to the function
            **kwargs: Keyword arguments to pass to the function

        Returns:
            Task: The submitted task
        """

    @abstractmethod
    def gather(self) -> List[Any]:
        """Wait for every task submitted since the last gather.

        Returns:
            Results in submission order

        Raises:
            Exception: the error of the first failed task, after all tasks finished
        """

    def map(self, label: str, func: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        """Submit ``func(item)`` for every item and gather the results in order."""
        for i, item in enumerate(items):
            self.submit(f"{label}[{i}]", func, item)
        return self.gather()

    def shutdown(self) -> None:
        """Release worker resources (no-op by default)."""
