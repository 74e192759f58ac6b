import pytest

from bribery.equilibrium import ModelParams


@pytest.fixture
def p0():
    """Worked-example parameter set used throughout the tests."""
    return ModelParams(pi_N=100, delta_pi0=300, M=20, F_L=10, s_N=1, s_P=4, c=100,
                       t_min=2, W=0, theta=0.5, V=200, kappa=0.25, g=2, n_days=10, mu=1)


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
