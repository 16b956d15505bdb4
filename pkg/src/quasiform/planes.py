"""Tangent 2-planes and the scalar curvatures attached to planes and plane pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericalError
from .tensors import MetricAtPoint, evaluate


def gram_schmidt(vectors: Sequence, metric: MetricAtPoint, tol: float = 1e-12) -> list[np.ndarray]:
    """g-orthonormalize in input order. Raises on (near) linear dependence."""
    out: list[np.ndarray] = []
    for v in vectors:
        u = np.array(v, dtype=float)
        scale = metric.norm(u)
        for e in out:
            u = u - metric.dot(e, u) * e
        nrm = metric.norm(u)
        if scale == 0.0 or nrm <= tol * scale:
            raise NumericalError("vectors are linearly dependent")
        u = u / nrm
        # second pass keeps orthogonality at rounding level
        for e in out:
            u = u - metric.dot(e, u) * e
        out.append(u / metric.norm(u))
    return out


@dataclass(frozen=True)
class TwoPlane:
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def spanned_by(cls, a, b, metric: MetricAtPoint) -> "TwoPlane":
        v, w = gram_schmidt([a, b], metric)
        return cls(v, w)

    def rotated(self, angle: float) -> "TwoPlane":
        """Another orthonormal basis of the same plane."""
        c, s = math.cos(angle), math.sin(angle)
        return TwoPlane(c * self.v + s * self.w, -s * self.v + c * self.w)


def angle_matrix(a: TwoPlane, b: TwoPlane, metric: MetricAtPoint) -> np.ndarray:
    return np.array(
        [[metric.dot(a.v, b.v), metric.dot(a.v, b.w)], [metric.dot(a.w, b.v), metric.dot(a.w, b.w)]]
    )


def plane_angle(a: TwoPlane, b: TwoPlane, metric: MetricAtPoint) -> float:
    """Angle psi in [0, pi/2] between two planes, from cos^2 psi = (det M)^2."""
    d = abs(float(np.linalg.det(angle_matrix(a, b, metric))))
    return math.acos(min(d, 1.0))


def sectional(R: np.ndarray, G: np.ndarray, plane: TwoPlane | tuple) -> float:
    v, w = (plane.v, plane.w) if isinstance(plane, TwoPlane) else plane
    den = evaluate(G, v, w, w, v)
    if not den > 1e-14 * max(1.0, float(np.max(np.abs(G)))) * (np.dot(v, v) * np.dot(w, w)):
        raise NumericalError("degenerate plane: spanning vectors are parallel")
    return evaluate(R, v, w, w, v) / den


def weyl_sectional(K: float, rho_v: float, rho_w: float, tau: float, n: int) -> float:
    """Sectional curvature of the Weyl tensor from K, the two Ricci curvatures and tau."""
    if n < 3:
        raise ValueError("needs dimension >= 3")
    return K - (rho_v + rho_w) / (n - 2) + tau / ((n - 1) * (n - 2))


def ricci_direction(S: np.ndarray, u, metric: MetricAtPoint, tol: float = 1e-9) -> float:
    u = np.asarray(u, dtype=float)
    if abs(metric.dot(u, u) - 1.0) > tol:
        raise ValueError("ricci_direction needs a unit vector")
    return float(u @ S @ u)


def double_sectional(
    RR: np.ndarray,
    TachR: np.ndarray,
    plane1: TwoPlane,
    plane2: TwoPlane,
    scale: float = 0.0,
    tol_dep: float = 1e-7,
) -> float | None:
    """Double sectional curvature L(plane1, plane2), or ``None`` for a curvature-independent pair.

    ``plane1 = x ^ y`` supplies the derivation slots, ``plane2 = v ^ w`` the
    curvature slots. ``scale`` is the norm of R at the point.
    """
    x, y = plane1.v, plane1.w
    v, w = plane2.v, plane2.w
    den = evaluate(TachR, v, w, w, v, x, y)
    if abs(den) <= tol_dep * (1.0 + scale):
        return None
    return evaluate(RR, v, w, w, v, x, y) / den


def six_argument_values(pack, X, X_perp, Y_perp, tol: float = 1e-9) -> tuple[float, float]:
    """Tachibana and R.R evaluated on ``(X~, Y_perp, Y_perp, X~; X, X_perp)``, ``X~ = (X + X_perp)/sqrt 2``.

    On a quasi space form with X in D and X_perp, Y_perp in D_perp these are
    ``K_perp - K_bar`` and ``K_bar (K_perp - K_bar)``.
    """
    metric = pack.metric
    vecs = [np.asarray(a, dtype=float) for a in (X, X_perp, Y_perp)]
    gram = np.array([[metric.dot(a, b) for b in vecs] for a in vecs])
    if np.max(np.abs(gram - np.eye(3))) > tol:
        raise ValueError("X, X_perp, Y_perp must be orthonormal")
    X, Xp, Yp = vecs
    Xt = (X + Xp) / math.sqrt(2.0)
    tach = evaluate(pack.TachR, Xt, Yp, Yp, Xt, X, Xp)
    rr = evaluate(pack.RR, Xt, Yp, Yp, Xt, X, Xp)
    return tach, rr


def qcc_predicted_K(q: int, K: float | None, K_perp: float, K_bar: float, theta: float, phi: float = 0.0) -> float:
    """Model sectional curvature of a plane at angles (theta, phi) to the distribution D."""
    if q < 1:
        raise ValueError("q must be >= 1")
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    if q == 1:
        return K_bar * c2 + K_perp * s2
    c2p, s2p = math.cos(phi) ** 2, math.sin(phi) ** 2
    return K * c2 * c2p + K_perp * s2 * s2p + K_bar * (c2 * s2p + s2 * c2p)


def plane_position(plane: TwoPlane, D_basis: Sequence, metric: MetricAtPoint) -> tuple[float, float]:
    """Angles (theta, phi) of a plane relative to D, from the principal angles between them.

    The singular values of the projection of the plane onto D are cos theta >= cos phi.
    For dim D = 1 only theta is meaningful and phi is returned as pi/2.
    """
    D = [np.asarray(d, dtype=float) for d in D_basis]
    M = np.array([[metric.dot(b, d) for d in D] for b in (plane.v, plane.w)])
    sv = np.linalg.svd(M, compute_uv=False)
    sv = np.clip(sv, 0.0, 1.0)
    theta = math.acos(sv[0])
    phi = math.acos(sv[1]) if len(sv) > 1 else math.pi / 2
    return theta, phi


def ricci_profile(q: int, n: int, K: float | None, K_perp: float, K_bar: float, psi: float) -> float:
    """Ricci curvature of ``U cos psi + U_perp sin psi`` on a quasi space form."""
    c2, s2 = math.cos(psi) ** 2, math.sin(psi) ** 2
    if q == 1:
        return K_bar + (n - 2) * (K_bar * c2 + K_perp * s2)
    return K_bar + (q - 1) * (K * c2 + K_bar * s2) + (n - q - 1) * (K_perp * s2 + K_bar * c2)


def ricci_profile_derivative(q: int, n: int, K: float | None, K_perp: float, K_bar: float, psi: float) -> float:
    cs = math.cos(psi) * math.sin(psi)
    if q == 1:
        return 2 * (n - 2) * cs * (K_perp - K_bar)
    return (n - 2) * cs * (K_perp - K)


def ricci_endpoints(q: int, n: int, K: float | None, K_perp: float, K_bar: float) -> tuple[float, float]:
    """``(rho, rho_perp)`` on D and D_perp of a quasi space form."""
    qp = n - q
    Kq = 0.0 if q == 1 else K
    return (q - 1) * Kq + qp * K_bar, q * K_bar + (qp - 1) * K_perp


def direction_profile(rho: float, rho_perp: float, theta: float) -> float:
    """Ricci curvature of ``X cos theta + X_perp sin theta`` on a quasi Einstein space."""
    return rho * math.cos(theta) ** 2 + rho_perp * math.sin(theta) ** 2


def random_plane(metric: MetricAtPoint, rng: np.random.Generator) -> TwoPlane:
    """A plane drawn from the rotation-invariant distribution on the tangent space."""
    coeffs = rng.standard_normal((2, metric.n))
    a, b = metric.frame @ coeffs[0], metric.frame @ coeffs[1]
    return TwoPlane.spanned_by(a, b, metric)
