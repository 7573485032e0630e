import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qct.statevec import make_rng  # noqa: E402

_CRITERIA: dict[str, list[str]] = {}


@pytest.fixture
def rng():
    return make_rng(12345)


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key == "criterion":
            _CRITERIA.setdefault(value, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split(".")[0])):
        outcomes = _CRITERIA[name]
        ok = all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  ({len(outcomes)} checks)")
