import numpy as np
import pytest

from hopfms import knots, realization

#: one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {number} ({title}): {status} -- {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def l0_knot():
    return knots.standard_hopf()


@pytest.fixture(scope="session")
def mazur():
    return knots.mazur_knot()


@pytest.fixture(scope="session")
def l0_map(l0_knot):
    return realization.realize(l0_knot)


@pytest.fixture(scope="session")
def mazur_map(mazur):
    return realization.realize(mazur)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
