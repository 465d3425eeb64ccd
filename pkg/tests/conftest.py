import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from incompat import SearchConfig
from incompat.linalg import qubit_observable

settings.register_profile("default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fast_config():
    return SearchConfig(restarts=16, max_iters=300, seed=42)


def qubit_pair(c: float):
    """Pair of qubit observables with Bloch vectors at cosine ``c``."""
    a = np.array([0.0, 0.0, 1.0])
    b = np.array([np.sqrt(max(0.0, 1.0 - c * c)), 0.0, c])
    return qubit_observable(a), qubit_observable(b)


_acceptance = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[props["criterion"]] = ("PASS" if report.passed else "FAIL", props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance, key=lambda k: int(k.split()[0])):
        verdict, detail = _acceptance[key]
        terminalreporter.write_line(f"criterion {key}: {verdict}  {detail}".rstrip())
