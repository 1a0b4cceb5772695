import numpy as np
import pytest

from pdem import exact, linear_well

M1, M2, A = 0.1, 0.2, 5.0

_acceptance = {}


@pytest.fixture(scope="session")
def well():
    return linear_well(M1, M2, A)


@pytest.fixture(scope="session")
def exact_levels():
    """Ten exact linear-well levels bisected well below test tolerances."""
    spectrum = exact.linear_well_exact_spectrum(M1, M2, A, 10, tol=1e-13)
    assert not spectrum.truncated
    return np.array([E for _, E in spectrum.levels])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            status = "FAIL (expected, " + report.wasxfail + ")"
        elif report.passed:
            status = "PASS"
        elif report.skipped:
            status = "SKIP"
        else:
            status = "FAIL"
        _acceptance[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, status = _acceptance[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status:<5}  {title}")
