"""Execution backend factory.

Returns a process-wide backend chosen from the settings. ``--threads`` on the
command line resets the factory so the next call honours the new pool size.
"""

from typing import Optional

import structlog

from owc_alloc.config import ExecutionBackend as ExecutionBackendEnum
from owc_alloc.config import get_settings
from owc_alloc.parallel.base import ExecutionBackend

logger = structlog.get_logger(__name__)

# Global singleton instance
_backend: Optional[ExecutionBackend] = None


def get_execution_backend() -> ExecutionBackend:
    """Get the configured execution backend instance.

    The thread pool is used when ``execution_backend`` is ``threads`` and more
    than one thread is configured; otherwise tasks run inline.
    """
    global _backend

    if _backend is None:
        settings = get_settings()
        if settings.execution_backend == ExecutionBackendEnum.THREADS and settings.threads > 1:
            from owc_alloc.parallel.thread_backend import ThreadPoolBackend

            _backend = ThreadPoolBackend(settings.threads)
        else:
            from owc_alloc.parallel.serial_backend import SerialBackend

            _backend = SerialBackend()
        logger.info(
            "execution_backend_initialized",
            backend=type(_backend).__name__,
            threads=settings.threads,
        )

    return _backend


def reset_execution_backend() -> None:
    """Shut down and forget the current backend."""
    global _backend

    if _backend is not None:
        _backend.shutdown()
        logger.debug("execution_backend_reset")
        _backend = None
