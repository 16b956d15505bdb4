import math

import numpy as np
import pytest

from quasiform import catalog
from quasiform import expr as ex
from quasiform.errors import MetricSourceError, NumericalError
from quasiform.metric import MetricField, format_metric, load_metric_file, parse_metric_source

from conftest import fd_jets, random_points


def test_semicolon_sphere_chart():
    m = parse_metric_source("dim=2; coords=u,v; g[1][1]=1; g[2][2]=sin(u)^2")
    assert m.n == 2 and m.coords == ("u", "v")
    g = m.matrix_at([math.pi / 2, 0.3])
    assert np.allclose(g, np.eye(2))
    assert m.domain == ((-1.0, 1.0), (-1.0, 1.0))


def test_file_with_comments_domain_and_off_diagonal(tmp_path):
    src = """
    # Nil
    dim = 3
    coords = x, y, z   # cartesian
    domain y = [-pi/4, 2]
    g[1][1] = 1
    g[2][2] = 1 + x^2
    g[3][2] = -x
    g[3][3] = 1
    """
    path = tmp_path / "nil.metric"
    path.write_text(src)
    m = load_metric_file(path)
    assert m.domain[1] == (pytest.approx(-math.pi / 4), 2.0)
    g = m.matrix_at([0.5, 0.0, 0.0])
    assert g[1, 2] == g[2, 1] == -0.5
    assert g[0, 1] == 0.0


@pytest.mark.parametrize(
    "text, line",
    [
        ("dim = 2\ncoords = x, y\ng[1][1] = 1+*2\n", 3),
        ("dim = 3\ncoords = x, y\n", None),
        ("dim = 2\ncoords = x, y\ng[1][2] = x\n", 3),
        ("dim = 2\ncoords = x, y\ng[3][1] = x\n", 3),
        ("dim = 2\ncoords = x, y\ng[1][1] = q\n", 3),
        ("dim = 2\ncoords = x, y\ng[1][1] = blah(x)\n", 3),
        ("dim = 2\ncoords = x, y\ng[1][1] = 1\ng[1][1] = 2\n", 4),
        ("dim = 2\ncoords = x, x\n", None),
        ("dim = 2\ncoords = x, sin\n", None),
        ("dim = 2\ncoords = x, y\ndomain x = [1, 0]\n", None),
        ("dim = 2\ncoords = x, y\ndomain w = [0, 1]\n", 3),
        ("dim = 1\ncoords = x\n", 1),
        ("dimension 2\n", 1),
    ],
)
def test_bad_sources_raise_with_position(text, line):
    with pytest.raises(MetricSourceError) as err:
        parse_metric_source(text)
    if line is not None:
        assert err.value.line == line


def test_dim_is_inferred_from_coords():
    m = parse_metric_source("coords = x, y\ng[1][1] = 1\ng[2][2] = 2\n")
    assert m.n == 2


def test_not_positive_definite_is_numerical_error():
    m = parse_metric_source("dim=2; coords=x,y; g[1][1]=x; g[2][2]=1")
    with pytest.raises(NumericalError):
        m.jets_at([-0.5, 0.0])


def test_undeclared_name_in_component_rejected():
    with pytest.raises(MetricSourceError):
        MetricField(("x", "y"), {(0, 0): ex.Var("z"), (1, 1): ex.num(1)})


@pytest.mark.parametrize("name", catalog.names())
def test_catalog_export_round_trip(name):
    m = catalog.get(name).metric
    back = parse_metric_source(format_metric(m), name)
    assert back.coords == m.coords
    assert back.domain == m.domain
    for p in random_points(m, 5, seed=1):
        assert np.array_equal(back.matrix_at(p), m.matrix_at(p))


@pytest.mark.parametrize("name", catalog.names())
def test_metric_jets_match_finite_differences(name):
    m = catalog.get(name).metric
    for p in random_points(m, 10, seed=11):
        g, dg, ddg = m.jets_at(p)
        fdg, fddg = fd_jets(m, p)
        assert np.all(np.abs(dg - fdg) <= 1e-5 * (1 + np.abs(dg)))
        assert np.all(np.abs(ddg - fddg) <= 1e-5 * (1 + np.abs(ddg)))


def test_scaled_and_pullback():
    m = catalog.get("nil").metric
    p = [0.3, -0.2, 0.1]
    assert np.allclose(m.scaled(4.0).matrix_at(p), 4 * m.matrix_at(p))
    A = np.array([[1.0, 0.2, 0.0], [0.1, 1.0, -0.3], [0.0, 0.4, 1.0]])
    b = np.array([0.05, -0.1, 0.0])
    pb = m.linear_pullback(A, shift=b)
    y = np.array([0.1, 0.05, -0.2])
    x = A @ y + b
    assert np.allclose(pb.matrix_at(y), A.T @ m.matrix_at(x) @ A, atol=1e-14)
    lo = np.array([d[0] for d in pb.domain])
    hi = np.array([d[1] for d in pb.domain])
    for corner in (lo, hi, np.where([1, 0, 1], lo, hi)):
        img = A @ corner + b
        assert all(d[0] - 1e-12 <= v <= d[1] + 1e-12 for v, d in zip(img, m.domain))
