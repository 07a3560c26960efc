import numpy as np
import pytest

from ncindex.algebra.groups import torus_action
from ncindex.suite import golden_group


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def torus_group():
    return torus_action(0.45)


@pytest.fixture
def golden():
    return golden_group()


def band_limited(rng, M, band, L=1.0):
    """Samples of a random trigonometric polynomial of degree ``band`` on ``M`` points."""
    c = rng.normal(size=2 * band + 1) + 1j * rng.normal(size=2 * band + 1)
    x = np.arange(M) * (L / M)
    k = np.arange(-band, band + 1)
    return np.exp(2j * np.pi * np.outer(x, k) / L) @ c


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n].line())
    passed = sum(r.passed for r in RESULTS.values())
    terminalreporter.write_line(f"{passed}/{len(RESULTS)} criteria passed")
