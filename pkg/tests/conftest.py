import numpy as np
import pytest

_acceptance = []


def record_acceptance(number, title, passed, detail=""):
    _acceptance.append((number, title, passed, detail))


@pytest.fixture
def acceptance():
    return record_acceptance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_hermitian(rng, d):
    M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (M + M.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_acceptance):
        terminalreporter.write_line("[{}] criterion {}: {}  {}".format(
            "PASS" if passed else "FAIL", number, title, detail))
