import random
import sys

import pytest


@pytest.fixture
def rng():
    return random.Random(20240917)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acceptance.TITLES):
        terminalreporter.write_line(acceptance.summary_line(n))
    for note in acceptance.NOTES:
        terminalreporter.write_line(note)
