import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fcaerr import ObjectMap, load_fixture  # noqa: E402


@pytest.fixture(scope="session")
def kw():
    return load_fixture("living_beings")


@pytest.fixture(scope="session")
def s_fig2():
    return load_fixture("living_beings_scale")


@pytest.fixture(scope="session")
def eq3():
    return load_fixture("eq3")


@pytest.fixture(scope="session")
def neq3():
    return load_fixture("neq3")


@pytest.fixture(scope="session")
def id3():
    return ObjectMap.identity(3)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by a test")


_criteria: dict[int, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, [title, "PASS", ""])
    if report.skipped:
        entry[1:] = ["SKIP", str(report.longrepr[-1]) if isinstance(report.longrepr, tuple) else ""]
    elif report.failed:
        crash = getattr(report.longrepr, "reprcrash", None)
        entry[1:] = ["FAIL", crash.message.splitlines()[0] if crash else ""]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, note = _criteria[number]
        line = f"{status:4}  {number}. {title}"
        terminalreporter.write_line(line + (f"  ({note})" if note else ""))
