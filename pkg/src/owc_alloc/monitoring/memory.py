"""Memory monitoring utilities.

Tracing the second-order kernel for a full eight-user room holds a few hundred MB
of intermediate arrays; these helpers log the process footprint around each
stage and record a snapshot in the run manifest.
"""

import os
from typing import Dict, Union

import psutil
import structlog

logger = structlog.get_logger(__name__)

_MB = 1024 * 1024


def get_memory_usage() -> Dict[str, Union[int, float]]:
    """Raw footprint of this process.

    ``rss`` and ``vms`` are in bytes, ``percent`` is the share of physical memory
    and ``threads`` counts live threads, tracing workers included.
    """
    process = psutil.Process(os.getpid())
    with process.oneshot():
        info = process.memory_info()
        return {
            "rss": info.rss,
            "vms": info.vms,
            "percent": process.memory_percent(),
            "threads": process.num_threads(),
        }


def memory_snapshot() -> Dict[str, float]:
    """RSS and VMS in MB, rounded for the run manifest."""
    metrics = get_memory_usage()
    return {
        "rss_mb": round(metrics["rss"] / _MB, 1),
        "vms_mb": round(metrics["vms"] / _MB, 1),
        "percent": round(float(metrics["percent"]), 2),
    }


def log_memory_usage(context: str = "general") -> Dict[str, float]:
    """Log current memory usage with context and return the snapshot.

    Args:
        context: Stage the measurement belongs to (``trace``, ``allocate``...)
    """
    snapshot = memory_snapshot()
    logger.info("memory_usage", context=context, **snapshot)
    return snapshot
