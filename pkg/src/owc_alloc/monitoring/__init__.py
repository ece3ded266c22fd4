"""Resource monitoring helpers."""

from owc_alloc.monitoring.memory import get_memory_usage, log_memory_usage, memory_snapshot

__all__ = ["get_memory_usage", "log_memory_usage", "memory_snapshot"]
