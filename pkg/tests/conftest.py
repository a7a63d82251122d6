import numpy as np
import pytest

from cdmasig import registry


@pytest.fixture
def A4():
    return registry.get("tabIII.A4").matrix


@pytest.fixture
def A5():
    return registry.get("tabIII.A5").matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


# received vector printed for the 8x10 enlarged example
EXAMPLE1_Y = np.array([-1.4586, -0.5227, -0.8251, -1.3148, 0.9584, -0.1522, 3.7170, 2.0180])
EXAMPLE1_X = np.array([1, 1, -1, -1, -1, -1, -1, 1, 1, -1])


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
