import numpy as np
import pytest

from quasiform.curvature import g_tensor
from quasiform.tensors import (
    MetricAtPoint,
    curvature_symmetry_residuals,
    evaluate,
    frobenius_norm,
    inner_product,
    lower_index,
    raise_index,
    to_frame,
    within,
)


def random_metric(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    return MetricAtPoint.from_matrix(a @ a.T + n * np.eye(n))


def brute_inner(A, B, ginv):
    # every index pair routed through g_inv, summed explicitly
    total = 0.0
    for idx in np.ndindex(*A.shape):
        for jdx in np.ndindex(*B.shape):
            w = np.prod([ginv[i, j] for i, j in zip(idx, jdx)])
            total += A[idx] * B[jdx] * w
    return total


def test_G_inner_G_on_identity():
    m = MetricAtPoint.from_matrix(np.eye(3))
    G = g_tensor(m)
    assert inner_product(G, G, m) == pytest.approx(12.0)
    assert brute_inner(G, G, m.g_inv) == pytest.approx(12.0)
    G4 = g_tensor(np.eye(4))
    assert np.count_nonzero(G4) == 24
    assert set(np.abs(G4[G4 != 0])) == {1.0}


def test_inner_product_matches_brute_force_and_is_symmetric_bilinear():
    m = random_metric(3, 0)
    rng = np.random.default_rng(1)
    A, B, C = (rng.normal(size=(3, 3, 3)) for _ in range(3))
    assert inner_product(A, B, m) == pytest.approx(brute_inner(A, B, m.g_inv), rel=1e-12)
    assert inner_product(A, B, m) == pytest.approx(inner_product(B, A, m), rel=1e-12)
    lhs = inner_product(2 * A - 3 * C, B, m)
    rhs = 2 * inner_product(A, B, m) - 3 * inner_product(C, B, m)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    assert inner_product(A, np.zeros_like(A), m) == 0.0
    assert inner_product(A, A, m) > 0


def test_mixed_variance():
    m = random_metric(3, 2)
    rng = np.random.default_rng(3)
    A = rng.normal(size=(3, 3))
    Au = raise_index(A, 0, m)
    assert inner_product(Au, Au, m, "ul") == pytest.approx(inner_product(A, A, m), rel=1e-12)
    with pytest.raises(ValueError):
        inner_product(A, rng.normal(size=(3, 3, 3)), m)
    with pytest.raises(ValueError):
        inner_product(A, A, m, "ux")


def test_raise_lower_round_trip():
    m = random_metric(4, 4)
    A = np.random.default_rng(5).normal(size=(4, 4, 4))
    for slot in range(3):
        back = lower_index(raise_index(A, slot, m), slot, m)
        assert np.max(np.abs(back - A)) <= 1e-12 * np.max(np.abs(A))
    assert np.allclose(m.g @ m.g_inv, np.eye(4), atol=1e-12)


def test_norm_invariant_under_frame_change():
    m = random_metric(3, 6)
    A = np.random.default_rng(7).normal(size=(3, 3, 3, 3))
    base = frobenius_norm(A, m)
    rng = np.random.default_rng(8)
    for _ in range(5):
        Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        E = m.frame @ Q  # another orthonormal frame
        Af = to_frame(A, E)
        assert np.sqrt(np.sum(Af**2)) == pytest.approx(base, rel=1e-9)
    assert np.allclose(m.frame.T @ m.g @ m.frame, np.eye(3), atol=1e-12)


def test_evaluate_and_within():
    G = g_tensor(np.eye(2))
    e1, e2 = np.eye(2)
    assert evaluate(G, e1, e2, e2, e1) == 1.0
    assert evaluate(G, e1, e1, e2, e1) == 0.0
    with pytest.raises(ValueError):
        evaluate(G, e1)
    assert within(1e-9, 1e-8, 0.0) and not within(3e-8, 1e-8, 1.0)


def test_symmetry_residuals_of_G_vanish():
    res = curvature_symmetry_residuals(g_tensor(random_metric(4, 9)))
    assert max(res.values()) < 1e-14
