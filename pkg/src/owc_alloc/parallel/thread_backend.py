"""Worker-thread execution backend.

Workers share the patch grids in memory; tracing tasks run numpy kernels that
release the GIL.
"""

import queue
import threading
from typing import Any, Callable, Dict, List, Optional

import structlog

from owc_alloc.config import get_settings
from owc_alloc.parallel.base import ExecutionBackend, Task

logger = structlog.get_logger(__name__)


class ThreadPoolBackend(ExecutionBackend):
    """Execution backend backed by a fixed pool of worker threads.

    Attributes:
        worker_threads: Number of worker threads
        workers: The started worker threads
        running: Flag indicating if workers are running
    """

    def __init__(self, worker_threads: Optional[int] = None):
        """Start the worker pool.

        Args:
            worker_threads: Pool size; defaults to the ``threads`` setting
        """
        self.worker_threads = worker_threads or get_settings().threads
        self.queue: "queue.Queue[tuple]" = queue.Queue()
        self.lock = threading.Lock()
        self.results: Dict[int, Any] = {}
        self.errors: Dict[int, BaseException] = {}
        self.pending: List[Task] = []
        self.workers: List[threading.Thread] = []
        self.running = False
        self._next_id = 0

        self._start_workers()
        logger.info("thread_backend_initialized", worker_threads=self.worker_threads)

    def submit(self, label: str, func: Callable[..., Any], *args: Any, **kwargs: Any) -> Task:
        task = Task(
            id=self._next_id,
            label=label,
            func_name=getattr(func, "__name__", repr(func)),
            args=args,
            kwargs=kwargs,
        )
        self._next_id += 1
        self.pending.append(task)
        self.queue.put((func, task))
        logger.debug("task_submitted", task=task.label, task_id=task.id)
        return task

    def gather(self) -> List[Any]:
        self.queue.join()
        pending, self.pending = self.pending, []
        with self.lock:
            results = [self.results.pop(task.id, None) for task in pending]
            errors = [self.errors.pop(task.id, None) for task in pending]
        for error in errors:
            if error is not None:
                raise error
        return results

    def _start_workers(self) -> None:
        self.running = True
        for i in range(self.worker_threads):
            worker = threading.Thread(
                target=self._worker_loop, name=f"TraceWorker-{i}", daemon=True
            )
            worker.start()
            self.workers.append(worker)

    def _worker_loop(self) -> None:
        while self.running:
            try:
                func, task = self.queue.get(timeout=0.1)
            except queue.Empty:
                continue
            try:
                result = func(*task.args, **task.kwargs)
                with self.lock:
                    self.results[task.id] = result
            except Exception as exc:
                logger.error("task_failed", task=task.label, error=str(exc), exc_info=True)
                with self.lock:
                    self.errors[task.id] = exc
            finally:
                self.queue.task_done()

    def shutdown(self) -> None:
        """Stop the worker threads after their current task."""
        self.running = False
        for worker in self.workers:
            worker.join(timeout=5.0)
            if worker.is_alive():
                logger.warning("worker_not_stopped", worker=worker.name)
        self.workers = []
        logger.info("thread_backend_shutdown")
