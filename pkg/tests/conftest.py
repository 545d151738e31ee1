import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from szego.hardy import FrequencyGrid, synth_rational
from szego.rational import RationalSymbol

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid():
    """The default laboratory grid."""
    return FrequencyGrid(256.0, 4096)


@pytest.fixture(scope="session")
def small_grid():
    return FrequencyGrid(64.0, 1024)


@pytest.fixture(scope="session")
def unit_symbol():
    return RationalSymbol.simple(1.0, -1j)


@pytest.fixture(scope="session")
def unit_soliton(grid, unit_symbol):
    return synth_rational(unit_symbol, grid)


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion; printed in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def record(number: int, name: str, passed: bool, detail: str) -> bool:
        lines.append((number, f"{'PASS' if passed else 'FAIL'}  [{number:2d} {name}] {detail}"))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines, key=lambda item: item[0]):
            terminalreporter.write_line(line)
