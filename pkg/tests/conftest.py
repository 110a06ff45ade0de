import pytest

_outcomes: dict[int, list[bool]] = {}


def pytest_runtest_logreport(report):
    # one verdict per acceptance criterion, failing if any of its tests fails
    k = dict(report.user_properties).get("acceptance")
    if k is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(k, []).append(report.outcome == "passed")


@pytest.fixture(autouse=True)
def _tag_acceptance(request):
    marker = request.node.get_closest_marker("acceptance")
    if marker is not None:
        request.node.user_properties.append(("acceptance", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        terminalreporter.write_line(f"ACCEPTANCE {k}: {'PASS' if all(_outcomes[k]) else 'FAIL'}")
