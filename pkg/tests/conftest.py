import functools

import pytest

from lhrhythm.config import builtin_defaults
from lhrhythm.pipeline import run_scenario


@functools.lru_cache(maxsize=None)
def scenario(kind, seed):
    return run_scenario(builtin_defaults(kind).with_seed(seed))


@pytest.fixture(scope="session")
def sinusoid_bundle():
    return scenario("sinusoid", builtin_defaults("sinusoid").schedule.seed)


@pytest.fixture(scope="session")
def damped_bundle():
    return scenario("damped", builtin_defaults("damped").schedule.seed)


ACCEPTANCE_LINES = []


def record_criterion(number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
