"""Shared fixtures and the acceptance summary printed after the run."""

import pytest

from capa_isac import channel_gains, correlations, default_scene

ACCEPTANCE_TITLES = {
    1: "closed-form gains vs oracle",
    2: "correlation quadrature vs oracle",
    3: "Pareto optimality of the KKT beam",
    4: "Rayleigh quotient closed form",
    5: "endpoint and limit identities",
    6: "qualitative comparisons at defaults",
    7: "sensing rate decreasing in frame length",
    8: "deterministic CSV output",
}

_outcomes = {}


@pytest.fixture(scope="session")
def scene():
    return default_scene()


@pytest.fixture(scope="session")
def gains(scene):
    return channel_gains(scene)


@pytest.fixture(scope="session")
def rho(scene):
    return correlations(scene)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        criterion = marker.args[0]
        ok = report.outcome == "passed"
        _outcomes.setdefault(criterion, []).append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE_TITLES):
        results = _outcomes.get(criterion)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(ok for _, ok in results) else "FAIL"
        failed = [name for name, ok in results or () if not ok]
        extra = f" (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(
            f"criterion {criterion} [{status}] {ACCEPTANCE_TITLES[criterion]}{extra}")
