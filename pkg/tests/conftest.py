import re

_CRITERIA: dict[int, list[str]] = {}
_TITLES: dict[int, str] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    _TITLES[n] = m.group(2).replace("_", " ")
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(n, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok = all(o == "passed" for o in _CRITERIA[n])
        terminalreporter.write_line(f"criterion {n:2d} {_TITLES[n]}: {'PASS' if ok else 'FAIL'}")
