import numpy as np
import pytest

_ACCEPTANCE_LINES = []


def record_criterion(label, ok, detail=""):
    """Remember one acceptance verdict for the end-of-run summary."""
    _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
    print(_ACCEPTANCE_LINES[-1])


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
