import numpy as np
import pytest

from gkp_diqkd.codes import CodeParams


@pytest.fixture(scope="session")
def params_02():
    """The workhorse symmetric point kappa = delta = 0.2."""
    return CodeParams(kappa=0.2, delta_state=0.2)


@pytest.fixture(scope="session")
def params_10db():
    return CodeParams.from_squeezing_db(10.0)


def dense_grid(half_width: float, n: int = 1 << 15):
    x = np.linspace(-half_width, half_width, n)
    return x, x[1] - x[0]


@pytest.fixture(scope="session")
def grid():
    return dense_grid


#: verdict lines collected by the acceptance suite, reprinted at the end
#: of the run so they are visible even when their tests pass
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
