import pytest

from hwroute.metric import MetricGraph, canonical_scale


def star_graph() -> MetricGraph:
    """Unit-weight K_{1,3} with the hub at 0."""
    return MetricGraph(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])


def two_clusters() -> MetricGraph:
    """u1=0 - u2=1 and v1=2 - v2=3 at weight 1, bridged u2-v1 at weight 25."""
    return MetricGraph(4, [(0, 1, 1), (2, 3, 1), (1, 2, 25)])


def triangle() -> MetricGraph:
    return MetricGraph(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)])


def path3() -> MetricGraph:
    return MetricGraph(3, [(0, 1, 1), (1, 2, 1)])


@pytest.fixture
def star():
    return star_graph()


@pytest.fixture
def scaled_star():
    return canonical_scale(star_graph())


@pytest.fixture
def clusters():
    return two_clusters()


@pytest.fixture
def scaled_clusters():
    return canonical_scale(two_clusters())


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
