import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pgl import GameParams


@pytest.fixture
def base():
    """The instance used throughout the examples: r0 = 2, eta = 0.01, c = 0.05."""
    return GameParams(r0=2.0, eta=0.01, c=0.05)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record a one-line pass/fail verdict for an acceptance criterion."""
    label = request.node.get_closest_marker("criterion").args[0]
    yield
    outcome = getattr(request.node, "_call_outcome", None)
    ACCEPTANCE_LINES.append((label, outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    report = (yield).get_result()
    if report.when == "call":
        item._call_outcome = "PASS" if report.passed else "FAIL"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"{outcome or 'ERROR'}  {label}")
