import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from keplambert import kernels
from keplambert.kernels import available_backends

settings.register_profile(
    "default", deadline=None, max_examples=60, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.register_profile(
    "stress", deadline=None, max_examples=2000,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile(os.environ.get("KEPLAMBERT_HYPOTHESIS", "default"))

BACKENDS = sorted(available_backends())
KERNEL_NAMES = ("kepler_elliptic", "kepler_hyperbolic", "stumpff_c2c3", "universal_tof",
                "universal_tof_split", "u_minus_sin", "sinh_minus", "conic_scale",
                "conic_state", "conic_anomaly", "conic_tof", "arc_anomalies", "arc_tof",
                "propagate")


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route every kernel call in the package through one backend."""
    mod = available_backends()[request.param]
    for name in KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(mod, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240611))



def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance")
        for line in sorted(mod.REPORT, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
