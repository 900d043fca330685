import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

_criteria = []


def record_criterion(name, passed, detail=""):
    _criteria.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
