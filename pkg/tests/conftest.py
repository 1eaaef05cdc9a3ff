import math

import pytest

from mmhom import _kernels
from mmhom.biphoton import BiphotonState, CrystalConfig, TwoPhotonPolarization, bell_state
from mmhom.hom import BeamSplitter, DetectionGeometry
from mmhom.modes import BeamGeometry

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_sessionstart(session):
    _kernels.warmup()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def geometry():
    return BeamGeometry(0.5, 351.1)


@pytest.fixture(scope="session")
def geom():
    return DetectionGeometry(1000.0)


@pytest.fixture(scope="session")
def bs():
    return BeamSplitter()


def make_state(mode, pol):
    if isinstance(pol, str):
        pol = bell_state(pol) if pol.startswith(("Psi", "Phi")) else TwoPhotonPolarization(PRODUCTS[pol])
    return BiphotonState(mode, pol, CrystalConfig.for_pump(mode))


PRODUCTS = {"hh": (1, 0, 0, 0), "hv": (0, 1, 0, 0), "vh": (0, 0, 1, 0), "vv": (0, 0, 0, 1)}
INV_SQRT2 = 1.0 / math.sqrt(2.0)
