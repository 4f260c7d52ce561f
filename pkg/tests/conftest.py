import numpy as np
import pytest

from cvkey import TwoModeCM
from cvkey.resources import squeezing_from_cosh2r

OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
PT = np.diag([1.0, 1.0, 1.0, -1.0])


def generic_symplectic(V):
    """Symplectic eigenvalues from the spectrum of i Omega V (test oracle only)."""
    m = V.matrix if isinstance(V, TwoModeCM) else np.asarray(V)
    ev = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ m)))[::-1]
    return ev[0], ev[2]


def generic_pt_min(V):
    m = V.matrix if isinstance(V, TwoModeCM) else np.asarray(V)
    return generic_symplectic(PT @ m @ PT)[1]


@pytest.fixture
def r50():
    """Squeezing at the reference operating point, cosh 2r = 50."""
    return squeezing_from_cosh2r(50.0)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record a one-line PASS/FAIL verdict for the acceptance summary."""
    def _report(label: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
