import json
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    k = mark.args[0]
    detail = dict(item.user_properties).get("detail", item.name)
    _ACCEPTANCE[k] = ("PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"ACCEPTANCE criterion {k}: {status} {detail}")


@pytest.fixture(scope="session")
def frozen():
    return json.loads((HERE / "data" / "frozen.json").read_text())
