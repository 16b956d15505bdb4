import numpy as np
import pytest

from quasiform import catalog
from quasiform.classify import ClassifyConfig
from quasiform.curvature import curvature_pack
from quasiform.theorems import catalog_report

ACCEPTANCE_LINES: list[str] = []


def fd_jets(metric, point, h=1e-4):
    """Central finite differences of the metric matrix: (dg, ddg) in the jets_at layout."""
    p = np.asarray(point, dtype=float)
    n = metric.n
    g = metric.matrix_at
    dg = np.zeros((n, n, n))
    ddg = np.zeros((n, n, n, n))
    e = np.eye(n) * h
    for k in range(n):
        dg[k] = (g(p + e[k]) - g(p - e[k])) / (2 * h)
        ddg[k, k] = (g(p + e[k]) - 2 * g(p) + g(p - e[k])) / h**2
        for l in range(k):
            mixed = (g(p + e[k] + e[l]) - g(p + e[k] - e[l]) - g(p - e[k] + e[l]) + g(p - e[k] - e[l])) / (4 * h * h)
            ddg[k, l] = ddg[l, k] = mixed
    return dg, ddg


def random_points(metric, count, seed, margin=0.02):
    rng = np.random.default_rng(seed)
    lo = np.array([d[0] for d in metric.domain])
    hi = np.array([d[1] for d in metric.domain])
    width = hi - lo
    return lo + margin * width + (1 - 2 * margin) * width * rng.random((count, metric.n))


def pack_of(name, point=None):
    m = catalog.get(name).metric
    if point is None:
        point = [(lo + hi) / 2 for lo, hi in m.domain]
    return curvature_pack(m, point)


def sol_frame(z):
    """Orthonormal frame of the Sol metric at height z: e1, e2 horizontal, e3 = d/dz."""
    return np.array([np.exp(-z), 0, 0]), np.array([0, np.exp(z), 0]), np.array([0, 0, 1.0])


@pytest.fixture(scope="session")
def default_config():
    return ClassifyConfig()


@pytest.fixture(scope="session")
def reports(default_config):
    """50-point reports of every catalog entry, computed once per session."""

    def get(name, samples=50, config=None):
        return catalog_report(name, config or default_config, samples)

    return get


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
