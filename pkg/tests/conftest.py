import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# acceptance criterion number -> [title, passed, seconds]
_CRITERIA = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            n, title = mark.args
            _CRITERIA.setdefault(n, [title, None, 0.0])


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when not in ("setup", "call"):
        return
    entry = _CRITERIA[mark.args[0]]
    failed = call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception)
    if call.when == "call":
        entry[2] += call.duration
        entry[1] = (entry[1] is not False) and not failed
    elif failed:
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, passed, seconds = _CRITERIA[n]
        status = "NOT RUN" if passed is None else ("PASS" if passed else "FAIL")
        terminalreporter.write_line(f"criterion {n:>2}: {status:<7} {title} ({seconds:.2f} s)")
