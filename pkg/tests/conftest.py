import pytest

from synthetic import write_synthetic

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    state = _criteria.setdefault(n, {"title": title, "status": "PASS"})
    if report.skipped and report.when in ("setup", "call"):
        if state["status"] == "PASS":
            state["status"] = "SKIP"
    elif report.failed:
        state["status"] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        c = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {c['status']}  {c['title']}")


@pytest.fixture
def synthetic(tmp_path):
    return write_synthetic(tmp_path / "data")
