import pytest

from rankeval.core import RankedList

PAPER_RANKS = (9, 4, 4, 2, 2, 2, 1, 1, 1, 1)

TABLE1_HYPOTHESES = (
    (9, 4, 4, 2, 2, 2, 1, 1, 1, 1),
    (9, 4, 4, 2, 2, 1, 2, 1, 1, 1),
    (4, 4, 2, 9, 2, 2, 1, 1, 1, 1),
    (1, 4, 4, 2, 2, 2, 9, 1, 1, 1),
    (1, 4, 4, 2, 2, 2, 1, 1, 1, 9),
    (1, 1, 1, 1, 2, 2, 2, 4, 4, 9),
)


@pytest.fixture
def paper_list():
    return RankedList.from_ranks(PAPER_RANKS)


_acceptance_lines = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label, title = marker.args
        status = "PASS" if report.passed else "FAIL"
        _acceptance_lines.append(f"{status}  criterion {label:<4} {title}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
