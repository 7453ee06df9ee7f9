"""Collects acceptance-criterion outcomes and prints one summary line per criterion."""

import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)_")


def pytest_configure(config):
    config._acceptance = {}


@pytest.fixture
def acceptance(request):
    """Attach a one-line measurement summary to the running criterion."""
    notes = request.config._acceptance.setdefault(request.node.nodeid, {"notes": []})

    def note(msg):
        notes["notes"].append(str(msg))
        print(msg)

    return note


_OUTCOMES = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    # the call phase decides; a failing setup also counts as a failed criterion
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _OUTCOMES[report.nodeid] = (int(m.group(1)), report.outcome)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (num, outcome) in sorted(_OUTCOMES.items(), key=lambda kv: kv[1][0]):
        status = "PASS" if outcome == "passed" else "FAIL"
        detail = "; ".join(config._acceptance.get(nodeid, {}).get("notes", []))
        terminalreporter.write_line(f"criterion {num}: {status}  {detail}".rstrip())
