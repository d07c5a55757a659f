import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wtfb.channel import BinaryWiretapParams, make_binary_channel

settings.register_profile(
    "wtfb", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("wtfb")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def binary_01_03():
    return make_binary_channel(BinaryWiretapParams(0.1, 0.3))


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Append ``(criterion, ok, text)``; the lines are printed in the terminal summary."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def log(number, ok, text):
        lines.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}")
        return ok

    return log


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
