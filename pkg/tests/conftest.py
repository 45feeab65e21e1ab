import pytest

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(num, title): marks a test as one acceptance criterion",
    )


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None and report.when == "call":
        num, title = marker.args
        if report.passed:
            outcome = "PASS"
        elif report.skipped:
            outcome = "SKIP"
        else:
            outcome = "FAIL"
        _CRITERIA[num] = (outcome, title)
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        outcome, title = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:02d} {outcome}: {title}")
