import numpy as np
import pytest

from qsingpert.qsys import QuantumLinearSystem

_ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Record one pass/fail line for the acceptance summary."""
    def record(label, passed, detail=""):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}" + (f" -- {detail}" if detail else ""))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def eq18_system():
    """Reduced two-cavity system for K1 = 4, K2 = 1."""
    return QuantumLinearSystem([[-0.5]], [[1.0]], [[1.0]], [[-1.0]])
