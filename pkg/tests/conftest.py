import sys
from pathlib import Path

import numpy as np
import pytest

from kinkcheck import parse_problem

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    return parse_problem((FIXTURES / name).read_text())


@pytest.fixture
def ex28():
    return load("ex2_8.anf")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
