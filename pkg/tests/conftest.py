import pytest

from marcumq.calibration import INIT_PREVIOUS, FitConfig, fit_grid

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def table_fits():
    """Default-config fits at a = 1..6, warm-started along the grid."""
    return fit_grid([1.0, 2.0, 3.0, 4.0, 5.0, 6.0], FitConfig(init=INIT_PREVIOUS))


@pytest.fixture
def record_criterion():
    def record(number, title, passed, detail=""):
        _ACCEPTANCE[number] = (title, passed, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title}: {detail}")
