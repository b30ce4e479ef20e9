import os
import random
from importlib import resources

import pytest
from hypothesis import HealthCheck, settings

from f2tiling.gf2core import Region, read_region

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def data_text(name):
    return resources.files("f2tiling").joinpath("data", name).read_text()


@pytest.fixture(scope="session")
def nontile6():
    """Size-8 non-tile in F_2^6 pinned from the exhaustive fixture scan."""
    return read_region(data_text("nontile_f6.txt"))


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_region(rng, n, size):
    return Region(n, frozenset(rng.sample(range(1 << n), size)))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
