import math

import pytest

from cavitydecay.green import CavityGeometry
from cavitydecay.medium import LorentzMedium

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fig3_geometry():
    return CavityGeometry.from_lambda(30.0, 1.0)


@pytest.fixture(scope="session")
def fig3_medium():
    return LorentzMedium(0.5, 1e-2)


@pytest.fixture(scope="session")
def fig4_medium():
    return LorentzMedium(0.5, 1e-4)


def gap_center(medium):
    return 0.5 * (medium.omega_t + medium.omega_l)


TWO_PI = 2.0 * math.pi
