"""Pytest configuration and fixtures."""

import os

import numpy as np
import pytest

from owc_alloc.config import reset_settings
from owc_alloc.models.allocation import AllocationProblem
from owc_alloc.models.channel import LD_POWER_W, LDS_PER_UNIT, AccessPoint, TraceConfig
from owc_alloc.models.geometry import Room, Vec3
from owc_alloc.models.receiver import NoiseModel
from owc_alloc.models.wavelength import Wavelength
from owc_alloc.parallel.factory import reset_execution_backend


@pytest.fixture(autouse=True)
def reset_singletons(monkeypatch, tmp_path):
    """Fresh settings and execution backend for every test, isolated from any .env file."""
    monkeypatch.chdir(tmp_path)
    for name in list(os.environ):
        if name.startswith("OWC_ALLOC_"):
            monkeypatch.delenv(name)
    reset_settings()
    reset_execution_backend()
    yield
    reset_execution_backend()
    reset_settings()


@pytest.fixture
def room():
    """The reference 4 m x 8 m x 3 m room."""
    return Room()


@pytest.fixture
def coarse_trace():
    """Trace options small enough for unit tests (0.5 m and 1 m elements)."""
    return TraceConfig(bin_width_s=1e-11, fine_element_m=0.5, coarse_element_m=1.0)


@pytest.fixture
def ceiling_ap():
    """Access point 1 of the reference layout."""
    return AccessPoint(ap_id=1, position=Vec3(1.0, 1.0, 3.0))


def _make_problem(gains, powers=None, wavelengths=(Wavelength.RED, Wavelength.BLUE), **kwargs):
    gains = np.asarray(gains, dtype=float)
    n_aps = gains.shape[2]
    if powers is None:
        unit = {w: LDS_PER_UNIT * p for w, p in LD_POWER_W.items()}
        powers = [[unit[w] for w in wavelengths] for _ in range(n_aps)]
    return AllocationProblem(
        gains=gains,
        ap_ids=tuple(range(1, n_aps + 1)),
        tx_power=np.asarray(powers, dtype=float),
        wavelengths=tuple(wavelengths),
        noise=kwargs.pop("noise", NoiseModel()),
        **kwargs,
    )


@pytest.fixture
def make_problem():
    """Factory for allocation problems over ``gains`` (users, branches, aps).

    Powers default to the reference light unit at each requested wavelength.
    """
    return _make_problem
