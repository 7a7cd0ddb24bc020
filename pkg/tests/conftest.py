from fractions import Fraction

import pytest

from choicegames.serialize import parse_game, parse_pairwise, parse_profile, read_json

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "criterion", None)
    if marker is not None:
        _criteria.append((marker, "PASS" if report.passed else "FAIL"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = (mark.args[0], mark.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), status in sorted(_criteria):
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}")


@pytest.fixture(scope="session")
def table2():
    return parse_pairwise(read_json("@table2"))


@pytest.fixture(scope="session")
def reconciled():
    return parse_profile(read_json("@table1_reconciled"))


@pytest.fixture(scope="session")
def printed():
    return parse_profile(read_json("@table1_printed"))


@pytest.fixture(scope="session")
def matrix1():
    return parse_game(read_json("@matrix1"))


@pytest.fixture(scope="session")
def matrix2():
    return parse_game(read_json("@matrix2"))


def F(x):
    return Fraction(x)
