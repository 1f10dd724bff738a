import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from relaybounds import zoo
from relaybounds.optimizer import SearchConfig

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def erasure():
    return zoo.from_name("erasure:alpha=0.3,eps=0.4")


@pytest.fixture(scope="session")
def mult():
    return zoo.from_name("multiplicative:alpha=0.5,delta=0.5")


@pytest.fixture(scope="session")
def config():
    return SearchConfig(seed=0)


def bsc(p: float) -> np.ndarray:
    return np.array([[1 - p, p], [p, 1 - p]])


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    """Log one acceptance verdict; the lines are repeated in the terminal summary."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
