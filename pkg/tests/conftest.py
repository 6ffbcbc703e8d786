import pytest

_RESULTS = {}


@pytest.fixture
def criterion(request):
    """Record a numbered acceptance criterion; the outcome is filled in by the hook below."""

    def register(number, title):
        _RESULTS[request.node.nodeid] = {"number": number, "title": title, "detail": "", "outcome": None}
        return _RESULTS[request.node.nodeid]

    return register


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    entry = _RESULTS.get(item.nodeid)
    if entry is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        entry["outcome"] = "PASS" if rep.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for entry in sorted(_RESULTS.values(), key=lambda e: e["number"]):
        line = f"criterion {entry['number']:>2}: {entry['outcome'] or 'NOT RUN'}  {entry['title']}"
        if entry["detail"]:
            line += f"  [{entry['detail']}]"
        terminalreporter.write_line(line)
