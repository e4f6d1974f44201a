from pathlib import Path

import pytest

from gapcert.complex import from_koszul, from_presentation
from gapcert.group import cyclic, free_abelian, free_group, symmetric3

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def z1():
    return free_abelian(1)


@pytest.fixture(scope="session")
def z2():
    return free_abelian(2)


@pytest.fixture(scope="session")
def z3():
    return free_abelian(3)


@pytest.fixture(scope="session")
def f2():
    return free_group(2)


@pytest.fixture(scope="session")
def c4():
    return cyclic(4)


@pytest.fixture(scope="session")
def s3():
    return symmetric3()


@pytest.fixture(scope="session")
def Z2(z2):
    return from_presentation(z2)


@pytest.fixture(scope="session")
def K3():
    return from_koszul(3)


@pytest.fixture(scope="session")
def C4(c4):
    return from_presentation(c4)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; assert on the outcome."""
    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + \
            (f" ({detail})" if detail else "")
        _ACCEPTANCE.append((number, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
