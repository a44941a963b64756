import sys
import numpy as np
import pytest
from hypothesis import settings

from manytoone import StandardChannel

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(key=20240601))


def ch3(a, b, P=(1, 1, 1)):
    return StandardChannel(3, [a, b], list(P))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
