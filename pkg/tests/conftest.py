import random

import pytest

from ribe.algebra import gen_pairing_groups

MOCK_Q = 101


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def mock_group():
    return gen_pairing_groups("mock", q=MOCK_Q)


@pytest.fixture
def mock_sym_group():
    return gen_pairing_groups("mock", q=MOCK_Q, symmetric=True)


@pytest.fixture(scope="session")
def prod_group():
    return gen_pairing_groups("production")


@pytest.fixture(scope="session")
def prod_sym_group():
    return gen_pairing_groups("production", symmetric=True)


@pytest.fixture(params=["mock", "production"])
def any_group(request):
    if request.param == "mock":
        return gen_pairing_groups("mock", q=MOCK_Q)
    return gen_pairing_groups("production")


@pytest.fixture(params=["mock", "production"])
def any_sym_group(request):
    if request.param == "mock":
        return gen_pairing_groups("mock", q=MOCK_Q, symmetric=True)
    return gen_pairing_groups("production", symmetric=True)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
