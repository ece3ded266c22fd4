"""Tests for the serial and worker-thread execution backends."""

import threading
import time

import pytest

from owc_alloc.parallel.base import Task
from owc_alloc.parallel.serial_backend import SerialBackend
from owc_alloc.parallel.thread_backend import ThreadPoolBackend


@pytest.fixture
def serial_backend():
    """Create an inline backend."""
    return SerialBackend()


@pytest.fixture
def thread_backend():
    """Create a four-thread backend."""
    backend = ThreadPoolBackend(4)
    yield backend
    # Cleanup
    backend.shutdown()


def test_serial_submit_runs_immediately(serial_backend):
    """Test that the serial backend executes the task inside submit."""
    calls = []

    task = serial_backend.submit("record", calls.append, 7)

    assert calls == [7]
    assert isinstance(task, Task)
    assert task.id == 0
    assert task.func_name == "append"


def test_serial_gather_returns_results_in_order(serial_backend):
    for value in range(5):
        serial_backend.submit(f"square[{value}]", lambda x: x * x, value)

    assert serial_backend.gather() == [0, 1, 4, 9, 16]
    assert serial_backend.gather() == []


def test_serial_gather_reraises_first_failure(serial_backend):
    """Test that a failing task surfaces at gather, not at submit."""

    def failing(value):
        raise RuntimeError(f"boom {value}")

    serial_backend.submit("ok", lambda: 1)
    serial_backend.submit("bad", failing, 1)
    serial_backend.submit("worse", failing, 2)

    with pytest.raises(RuntimeError, match="boom 1"):
        serial_backend.gather()


def test_thread_backend_starts_workers(thread_backend):
    assert thread_backend.worker_threads == 4
    assert len(thread_backend.workers) == 4
    assert thread_backend.running is True


def test_thread_gather_preserves_submission_order(thread_backend):
    """Test that results come back in submission order regardless of finish order."""

    def slow_identity(value, delay):
        time.sleep(delay)
        return value

    for value in range(8):
        thread_backend.submit(f"task[{value}]", slow_identity, value, delay=0.01 * (8 - value))

    assert thread_backend.gather() == list(range(8))


def test_thread_backend_runs_concurrently(thread_backend):
    """Test that tasks occupy more than one worker thread."""
    seen = set()
    lock = threading.Lock()

    def record():
        time.sleep(0.05)
        with lock:
            seen.add(threading.current_thread().name)

    for i in range(8):
        thread_backend.submit(f"record[{i}]", record)
    thread_backend.gather()

    assert len(seen) > 1


def test_thread_gather_reraises_lowest_failed_task(thread_backend):
    def failing(value):
        time.sleep(0.01 * (3 - value))
        raise ValueError(f"task {value}")

    for value in range(3):
        thread_backend.submit(f"fail[{value}]", failing, value)

    with pytest.raises(ValueError, match="task 0"):
        thread_backend.gather()


def test_map_matches_between_backends(serial_backend, thread_backend):
    items = list(range(20))

    serial = serial_backend.map("double", lambda x: 2 * x, items)
    threaded = thread_backend.map("double", lambda x: 2 * x, items)

    assert serial == threaded == [2 * x for x in items]


def test_shutdown_stops_workers():
    """Test that shutdown joins every worker thread."""
    backend = ThreadPoolBackend(2)

    backend.shutdown()

    assert backend.running is False
    assert backend.workers == []
