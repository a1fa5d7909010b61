import pytest

from sspgames.formats import fixture_path, parse_model, parse_strategy

_ACCEPTANCE_LINES = []


def record_acceptance(line):
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def commuting():
    return parse_model(fixture_path("commuting.json"))


@pytest.fixture(scope="session")
def bus_taxi():
    return parse_model(fixture_path("bus-taxi.json"))


@pytest.fixture(scope="session")
def lawnmower():
    return parse_model(fixture_path("lawnmower.json"))


@pytest.fixture(scope="session")
def shortest_path():
    return parse_model(fixture_path("shortest-path.json"))


@pytest.fixture(scope="session")
def strategy():
    return lambda name: parse_strategy(fixture_path(f"strategy-{name}.json"))
