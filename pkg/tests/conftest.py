import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ddfkit.field import InducedFieldAdapter  # noqa: E402
from ddfkit.geometry import Domain, InducedField, Sphere, icosphere  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def unit_domain():
    return Domain(epsilon=0.05)


@pytest.fixture(scope="session")
def sphere_field(unit_domain):
    """Analytic sphere of radius 0.5 at the origin."""
    return InducedFieldAdapter(InducedField([Sphere((0.0, 0.0, 0.0), 0.5)], unit_domain))


@pytest.fixture(scope="session")
def ico_mesh():
    return icosphere(4, 0.8)  # 5120 triangles


@pytest.fixture(scope="session")
def ico_field(ico_mesh, unit_domain):
    return InducedFieldAdapter(InducedField(ico_mesh, unit_domain))


# ---- acceptance summary -------------------------------------------------------------

CRITERIA = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[CRITERIA] = []


@pytest.fixture
def report_criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion and return the verdict."""
    lines = request.config.stash[CRITERIA]

    def report(number, title, passed, detail):
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        lines.append((number, line))
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
