from __future__ import annotations

import pytest

from confblocks.fock import FockModule, FockVOA


@pytest.fixture(scope="session")
def lattice1():
    return FockVOA(6, k=1)


@pytest.fixture(scope="session")
def lattice2():
    return FockVOA(4, k=2)


@pytest.fixture(scope="session")
def heisenberg():
    return FockVOA(6)


@pytest.fixture(scope="session")
def lattice1_modules(lattice1):
    return {lab: FockModule(lattice1, lab, 4) for lab in (0, 1)}


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
