import numpy as np
import pytest

from pricevuln import compute_all, fit, price_clusters, synthesize
from pricevuln.clustering import ClusterConfig
from pricevuln.pricing import synthetic_curve
from pricevuln.profiles import MixtureSpec, demo_mixture
from pricevuln.scenarios import planted_population


def unit(x):
    x = np.asarray(x, dtype=float)
    return x / x.sum()


def random_simplex(rng, H, sparse=False):
    x = rng.random(H)
    if sparse:
        x[rng.random(H) < 0.4] = 0.0
        if x.sum() == 0:
            x[rng.integers(H)] = 1.0
    return x / x.sum()


class Fitted:
    def __init__(self, data, k, curve, seed=0, center_update="median"):
        self.data = data
        self.curve = curve
        self.model = fit(data, k, ClusterConfig(seed=seed, center_update=center_update))
        self.prices = price_clusters(self.model, curve)
        self.records = compute_all(data, self.model, self.prices)


@pytest.fixture(scope="session")
def demo600():
    data = synthesize(demo_mixture(600, n_prototypes=40, sigma=0.15, seed=3))
    return Fitted(data, 8, synthetic_curve())


@pytest.fixture(scope="session")
def planted():
    pp = planted_population()
    f = Fitted(pp.data, 3, pp.curve)
    f.pop = pp
    return f


@pytest.fixture(scope="session")
def two_blobs():
    H = 8
    a = np.array([5, 5, 5, 5, 0.2, 0.2, 0.2, 0.2])
    b = a[::-1].copy()
    return synthesize(MixtureSpec([a, b], [30, 25], sigma=0.05, seed=11))


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


_criteria = {}


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    n, text = crit
    ok = _criteria.get(n, (text, True))[1]
    if report.failed or (report.when == "call" and not report.passed):
        ok = False
    _criteria[n] = (text, ok)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, ok = _criteria[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
