import pytest

from qforge import MainEngine
from qforge.backends import Simulator


@pytest.fixture
def sim_eng():
    """Default chain in front of a seeded simulator."""
    sim = Simulator(seed=11)
    return MainEngine(sim), sim


@pytest.fixture
def raw_eng():
    """No compiler engines: the simulator sees exactly what is emitted."""
    sim = Simulator(seed=11)
    return MainEngine(sim, []), sim


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
