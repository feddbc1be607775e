import re

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    number = int(re.search(r"test_criterion_(\d+)", report.nodeid).group(1))
    failed = report.failed
    if report.when == "call" or failed:
        _ACCEPTANCE[number] = _ACCEPTANCE.get(number, True) and not failed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status = "PASS" if _ACCEPTANCE[number] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {CRITERIA[number]}")
