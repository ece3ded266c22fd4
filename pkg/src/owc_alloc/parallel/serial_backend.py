"""Inline execution backend: tasks run immediately when submitted."""

from typing import Any, Callable, List, Optional, Tuple

import structlog

from owc_alloc.parallel.base import ExecutionBackend, Task

logger = structlog.get_logger(__name__)


class SerialBackend(ExecutionBackend):
    """Runs each task synchronously inside ``submit``.

    Failures are held until ``gather`` so both backends report errors the same way.
    """

    def __init__(self) -> None:
        self._next_id = 0
        self._done: List[Tuple[Task, Any, Optional[BaseException]]] = []
        logger.debug("serial_backend_initialized")

    def submit(self, label: str, func: Callable[..., Any], *args: Any, **kwargs: Any) -> Task:
        task = Task(
            id=self._next_id,
            label=label,
            func_name=getattr(func, "__name__", repr(func)),
            args=args,
            kwargs=kwargs,
        )
        self._next_id += 1
        try:
            result = func(*args, **kwargs)
            self._done.append((task, result, None))
        except Exception as exc:
            logger.error("task_failed", task=task.label, error=str(exc))
            self._done.append((task, None, exc))
        return task

    def gather(self) -> List[Any]:
        done, self._done = self._done, []
        for _task, _, error in done:
            if error is not None:
                raise error
        return [result for _, result, _ in done]
