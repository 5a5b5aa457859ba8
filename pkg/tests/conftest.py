import sys

import numpy as np
import pytest

RHO_E = 0.5 * np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]], dtype=complex)
H = np.array([[0, 0, 0, 1], [0, -2, 1, 0], [0, 1, -2, 0], [1, 0, 0, 0]], dtype=complex)


@pytest.fixture
def rho_e():
    return RHO_E.copy()


@pytest.fixture
def h_matrix():
    return H.copy()


def pytest_terminal_summary(terminalreporter):
    mods = [m for name, m in sys.modules.items() if name.split(".")[-1] == "test_acceptance"]
    rows = getattr(mods[0], "RESULTS", {}) if mods else {}
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(rows):
        title, ok, why = rows[number]
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}"
        terminalreporter.write_line(line + (f" ({why})" if why else ""))
