import numpy as np
import pytest

from anisohardy.gauge import make_gauge, polar


def gauge_zoo():
    return {
        "euclidean2": make_gauge("euclidean", 2),
        "ellipsoidal2": make_gauge("ellipsoidal", 2, matrix=np.diag([4.0, 1.0])),
        "tilted_ellipsoidal2": make_gauge("ellipsoidal", 2, matrix=[[4.0, 1.0], [1.0, 1.0]]),
        "lq3_2": make_gauge("weighted-lq", 2, q=3, weights=[1.0, 2.0]),
        "euclidean3": make_gauge("euclidean", 3),
        "lq3_3": make_gauge("weighted-lq", 3, q=3, weights=[1.0, 2.0, 0.5]),
    }


@pytest.fixture(params=sorted(gauge_zoo()))
def any_gauge(request):
    g = gauge_zoo()[request.param]
    return g, polar(g)


@pytest.fixture
def lq2():
    g = make_gauge("weighted-lq", 2, q=3, weights=[1.0, 2.0])
    return g, polar(g)


@pytest.fixture
def lq3():
    g = make_gauge("weighted-lq", 3, q=3, weights=[1.0, 2.0, 0.5])
    return g, polar(g)


@pytest.fixture
def euc2():
    g = make_gauge("euclidean", 2)
    return g, polar(g)


@pytest.fixture
def euc3():
    g = make_gauge("euclidean", 3)
    return g, polar(g)


# -- acceptance summary: one line per criterion -----------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    n, title = marker
    failed = report.failed
    if report.when == "call" or failed:
        prev = _CRITERIA.get(n, (title, True))
        _CRITERIA[n] = (title, prev[1] and not failed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result().criterion = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}")
