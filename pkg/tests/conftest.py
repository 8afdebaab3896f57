"""Collects one PASS/FAIL line per acceptance criterion and prints them at the end."""

import pytest

_verdicts = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and report.passed:
        return
    label, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    if report.failed:
        _verdicts[label] = ("FAIL", title, detail)
    elif report.when == "call":
        _verdicts[label] = ("PASS", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for label, (verdict, title, detail) in _verdicts.items():
        line = f"{verdict}  {label:<4} {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
    failed = sum(v[0] == "FAIL" for v in _verdicts.values())
    terminalreporter.write_line(f"{len(_verdicts) - failed} passed, {failed} failed")
