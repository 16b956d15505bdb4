import math

import numpy as np
import pytest

from quasiform import planes as pl
from quasiform.classify import detect_qcc, ricci_spectrum
from quasiform.errors import NumericalError
from quasiform.tensors import MetricAtPoint, evaluate

from conftest import pack_of, sol_frame

E4 = MetricAtPoint.from_matrix(np.eye(4))


def test_plane_angle_examples():
    e = np.eye(4)
    a = pl.TwoPlane.spanned_by(e[0], e[1], E4)
    assert pl.plane_angle(a, a, E4) == 0.0
    b = pl.TwoPlane.spanned_by(e[2], e[3], E4)
    assert pl.plane_angle(a, b, E4) == pytest.approx(math.pi / 2)
    c = pl.TwoPlane.spanned_by(e[0], math.cos(0.7) * e[1] + math.sin(0.7) * e[2], E4)
    assert pl.plane_angle(a, c, E4) == pytest.approx(0.7, abs=1e-12)


def test_plane_angle_symmetric_and_basis_free():
    rng = np.random.default_rng(0)
    g = rng.normal(size=(4, 4))
    m = MetricAtPoint.from_matrix(g @ g.T + 4 * np.eye(4))
    for _ in range(20):
        a, b = pl.random_plane(m, rng), pl.random_plane(m, rng)
        psi = pl.plane_angle(a, b, m)
        assert psi == pytest.approx(pl.plane_angle(b, a, m), abs=1e-12)
        assert psi == pytest.approx(pl.plane_angle(a.rotated(1.1), b.rotated(-0.4), m), abs=1e-9)
        d = np.linalg.det(pl.angle_matrix(a, b, m)) ** 2
        assert -1e-12 <= d <= 1 + 1e-12


def test_two_plane_is_orthonormal_and_degenerate_rejected():
    m = MetricAtPoint.from_matrix(np.diag([1.0, 4.0, 9.0]))
    p = pl.TwoPlane.spanned_by([1, 1, 0], [0, 1, 1], m)
    assert m.dot(p.v, p.v) == pytest.approx(1) and m.dot(p.w, p.w) == pytest.approx(1)
    assert abs(m.dot(p.v, p.w)) < 1e-12
    with pytest.raises(NumericalError):
        pl.TwoPlane.spanned_by([1, 2, 3], [2, 4, 6], m)


def test_sectional_examples():
    s3 = pack_of("s3", [1.0, 2.0, 0.3])
    rng = np.random.default_rng(1)
    for _ in range(10):
        assert pl.sectional(s3.R, s3.G, pl.random_plane(s3.metric, rng)) == pytest.approx(1.0, abs=1e-10)
    e3 = pack_of("e3")
    assert pl.sectional(e3.R, e3.G, pl.random_plane(e3.metric, rng)) == 0.0
    sol = pack_of("sol", [0.0, 0.0, 0.2])
    e1, e2, e3v = sol_frame(0.2)
    assert pl.sectional(sol.R, sol.G, (e3v, e1)) == pytest.approx(-1.0)
    assert pl.sectional(sol.R, sol.G, (2 * e3v, e1 + e3v)) == pytest.approx(-1.0)
    with pytest.raises(NumericalError):
        pl.sectional(sol.R, sol.G, (e1, 3 * e1))


def test_sectional_basis_invariance():
    pk = pack_of("generic4", [0.3, 0.4, 0.5, 0.6])
    rng = np.random.default_rng(2)
    plane = pl.random_plane(pk.metric, rng)
    K = pl.sectional(pk.R, pk.G, plane)
    for ang in rng.uniform(0, 2 * math.pi, 50):
        assert pl.sectional(pk.R, pk.G, plane.rotated(ang)) == pytest.approx(K, abs=1e-10 * (1 + abs(K)))


@pytest.mark.parametrize("name", ["s4", "s2xh2", "generic4", "warped4"])
def test_weyl_sectional_matches_tensor(name):
    pk = pack_of(name)
    rng = np.random.default_rng(3)
    for _ in range(10):
        pi = pl.random_plane(pk.metric, rng)
        K = pl.sectional(pk.R, pk.G, pi)
        rho_v = pl.ricci_direction(pk.S, pi.v, pk.metric)
        rho_w = pl.ricci_direction(pk.S, pi.w, pk.metric)
        Kc = pl.weyl_sectional(K, rho_v, rho_w, pk.tau, pk.n)
        assert Kc == pytest.approx(evaluate(pk.C, pi.v, pi.w, pi.w, pi.v), abs=1e-9)


def test_weyl_sectional_arithmetic():
    assert pl.weyl_sectional(1.0, 3.0, 3.0, 12.0, 4) == 0.0
    with pytest.raises(ValueError):
        pl.weyl_sectional(1.0, 1.0, 1.0, 2.0, 2)


def test_ricci_direction_examples():
    s3 = pack_of("s3")
    u = s3.metric.frame[:, 1]
    assert pl.ricci_direction(s3.S, u, s3.metric) == pytest.approx(2.0)
    sol = pack_of("sol", [0, 0, 0.4])
    assert pl.ricci_direction(sol.S, sol_frame(0.4)[2], sol.metric) == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        pl.ricci_direction(sol.S, [0, 0, 2.0], sol.metric)


def test_ricci_direction_is_sum_of_sectionals():
    pk = pack_of("generic4", [0.5, 0.5, 0.5, 0.5])
    rng = np.random.default_rng(4)
    Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    E = pk.metric.frame @ Q
    u = E[:, 0]
    total = sum(pl.sectional(pk.R, pk.G, (u, E[:, t])) for t in range(1, 4))
    assert pl.ricci_direction(pk.S, u, pk.metric) == pytest.approx(total, abs=1e-10)


def test_double_sectional_examples():
    h3 = pack_of("h3")
    rng = np.random.default_rng(5)
    a, b = pl.random_plane(h3.metric, rng), pl.random_plane(h3.metric, rng)
    assert pl.double_sectional(h3.RR, h3.TachR, a, b) is None
    sol = pack_of("sol", [0.3, 0.1, -0.2])
    e1, e2, e3 = sol_frame(-0.2)
    p1 = pl.TwoPlane(e3, e1)
    p2 = pl.TwoPlane((e3 + e1) / math.sqrt(2), e2)
    assert pl.double_sectional(sol.RR, sol.TachR, p1, p2) == pytest.approx(-1.0, abs=1e-12)
    nil = pack_of("nil", [0.0, 0.0, 0.0])
    spec = ricci_spectrum(nil.S_op, nil.metric)
    X = spec.bases[0][:, 0]  # the +1/2 direction
    Xp, Yp = spec.bases[1][:, 0], spec.bases[1][:, 1]
    L = pl.double_sectional(nil.RR, nil.TachR, pl.TwoPlane(X, Xp), pl.TwoPlane((X + Xp) / math.sqrt(2), Yp))
    assert L == pytest.approx(0.25, abs=1e-12)


def test_six_argument_values():
    sol = pack_of("sol", [0.0, 0.0, 0.5])
    e1, e2, e3 = sol_frame(0.5)
    assert pl.six_argument_values(sol, e3, e1, e2) == pytest.approx((2.0, -2.0), abs=1e-12)
    with pytest.raises(ValueError):
        pl.six_argument_values(sol, e3, e1, 2 * e2)
    pk = pack_of("s2xh2", [1.0, 0.3, 0.1, -0.2])
    q = detect_qcc(pk, ricci_spectrum(pk.S_op, pk.metric))
    tach, rr = pl.six_argument_values(pk, q.D[:, 0], q.D_perp[:, 0], q.D_perp[:, 1])
    assert (tach, rr) == pytest.approx((-1.0, 0.0), abs=1e-12)
    e3p = pack_of("e3")
    e = np.eye(3)
    assert pl.six_argument_values(e3p, e[0], e[1], e[2]) == (0.0, 0.0)


def test_qcc_predicted_K_examples():
    assert pl.qcc_predicted_K(1, None, 2.0, -1.0, 0.0) == -1.0
    assert pl.qcc_predicted_K(1, None, 2.0, -1.0, math.pi / 2) == pytest.approx(2.0)
    assert pl.qcc_predicted_K(2, 1.0, -1.0, 0.0, 0.0, math.pi / 2) == pytest.approx(0.0)
    assert pl.qcc_predicted_K(2, 3.0, 1.0, 2.0, 0.0, math.pi / 2) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        pl.qcc_predicted_K(0, None, 1.0, 0.0, 0.0)


def test_plane_position_recovers_angles():
    m = MetricAtPoint.from_matrix(np.eye(4))
    e = np.eye(4)
    th, ph = 0.3, 1.1
    plane = pl.TwoPlane(
        math.cos(th) * e[0] + math.sin(th) * e[2], math.cos(ph) * e[1] + math.sin(ph) * e[3]
    )
    assert pl.plane_position(plane, [e[0], e[1]], m) == pytest.approx((th, ph), abs=1e-12)


def test_ricci_profile_examples():
    assert pl.ricci_profile(1, 4, None, 5.0, 2.0, 0.0) == pytest.approx(3 * 2.0)
    assert pl.ricci_profile(1, 3, None, 1.0, -1.0, math.pi / 4) == pytest.approx(-1.0)
    sol = pack_of("sol", [0, 0, 0.1])
    e1, e2, e3 = sol_frame(0.1)
    for psi in np.linspace(0, math.pi / 2, 7):
        u = math.cos(psi) * e3 + math.sin(psi) * e1
        assert pl.ricci_direction(sol.S, u, sol.metric) == pytest.approx(
            pl.ricci_profile(1, 3, None, 1.0, -1.0, psi), abs=1e-12
        )
    rho, rho_p = pl.ricci_endpoints(1, 3, None, 1.0, -1.0)
    assert (rho, rho_p) == (-2.0, 0.0)
    rng = np.random.default_rng(6)
    for th in rng.uniform(0, math.pi / 2, 20):
        u = math.cos(th) * e3 + math.sin(th) * e2
        assert pl.ricci_direction(sol.S, u, sol.metric) == pytest.approx(pl.direction_profile(rho, rho_p, th), abs=1e-12)


def test_ricci_profile_derivative_matches_difference_quotient():
    for args in [(1, 3, None, 1.0, -1.0), (2, 5, 1.0, -2.0, -0.5), (1, 4, None, 0.3, 0.7)]:
        for psi in (0.2, 0.7, 1.3):
            h = 1e-6
            fd = (pl.ricci_profile(*args, psi + h) - pl.ricci_profile(*args, psi - h)) / (2 * h)
            assert pl.ricci_profile_derivative(*args, psi) == pytest.approx(fd, rel=1e-6, abs=1e-8)
