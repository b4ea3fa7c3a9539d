import pytest

from metalfilm.dielectric import SODIUM

# one summary line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def plasma():
    """Sodium with nu = 0.001 omega_p, the collision rate used throughout."""
    return SODIUM.with_eps(1e-3)


@pytest.fixture
def report():
    def add(criterion, passed, detail):
        line = f"[criterion {criterion:>2}] {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
