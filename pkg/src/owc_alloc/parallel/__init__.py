"""Execution backends for channel tracing tasks."""

from owc_alloc.parallel.base import ExecutionBackend, Task
from owc_alloc.parallel.factory import get_execution_backend, reset_execution_backend

__all__ = ["ExecutionBackend", "Task", "get_execution_backend", "reset_execution_backend"]
