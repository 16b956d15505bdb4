"""Curvature tensors of a metric at a point.

Conventions (see docs/conventions.md):

* ``R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`` and ``R(X,Y,V,W) = g(R(X,Y)V, W)``,
  stored as ``R[i,j,k,l] = R(d_i, d_j, d_k, d_l)``.
* ``G[i,j,k,l] = g_il g_jk - g_ik g_jl`` so ``G(v,w,w,v) = |v|^2 |w|^2 - g(v,w)^2``.
* Sectional curvature ``K = R(v,w,w,v) / G(v,w,w,v)``; the unit sphere has ``K = +1``
  and satisfies ``R = G``.
* ``S(X,Y) = sum_t R(X,E_t,E_t,Y)``, ``tau = tr_g S``.
* Derivations act slot-wise with a minus sign:
  ``(B . T)(V_1..V_k; X, Y) = -sum_s T(.., B(X,Y) V_s, ..)`` where ``B(X,Y)`` is
  either the curvature operator or the metric endomorphism ``X ^_g Y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericalError
from .metric import MetricField
from .tensors import MetricAtPoint, curvature_symmetry_residuals


def christoffel_from_jets(g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """``gamma[k, i, j] = Gamma^k_ij`` from ``dg[m, i, j] = d_m g_ij``."""
    # first kind: Gamma_{l i j} = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    first = 0.5 * (
        np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    )
    return np.einsum("kl,lij->kij", g_inv, first)


def _christoffel_derivative(g_inv, dg, ddg, gamma_first_kind):
    """``dgamma[m, k, i, j] = d_m Gamma^k_ij``."""
    # d_m Gamma_{l i j}
    d_first = 0.5 * (
        np.einsum("mijl->mlij", ddg) + np.einsum("mjil->mlij", ddg) - np.einsum("mlij->mlij", ddg)
    )
    # d_m g^{kl} = -g^{ka} d_m g_ab g^{bl}
    d_ginv = -np.einsum("ka,mab,bl->mkl", g_inv, dg, g_inv)
    return np.einsum("mkl,lij->mkij", d_ginv, gamma_first_kind) + np.einsum(
        "kl,mlij->mkij", g_inv, d_first
    )


def christoffel(m: MetricField, point: Sequence[float]) -> np.ndarray:
    g, dg, _ = m.jets_at(point)
    return christoffel_from_jets(np.linalg.inv(g), dg)


def riemann_from_jets(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray):
    """Return ``(gamma, R)`` with ``R`` the (0,4) Riemann tensor in the module conventions."""
    g_inv = np.linalg.inv(g)
    first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    gamma = np.einsum("kl,lij->kij", g_inv, first)
    dgamma = _christoffel_derivative(g_inv, dg, ddg, first)
    # R(d_i, d_j) d_k = Rop[l, k, i, j] d_l
    #   = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    d_term = np.einsum("iljk->lkij", dgamma)
    rop = d_term - d_term.transpose(0, 1, 3, 2)
    gg = np.einsum("lim,mjk->lkij", gamma, gamma)
    rop = rop + gg - gg.transpose(0, 1, 3, 2)
    R = np.einsum("la,akij->ijkl", g, rop)
    return gamma, R


def riemann(m: MetricField, point: Sequence[float]) -> np.ndarray:
    return riemann_from_jets(*m.jets_at(point))[1]


def g_tensor(metric: MetricAtPoint | np.ndarray) -> np.ndarray:
    g = metric.g if isinstance(metric, MetricAtPoint) else np.asarray(metric, dtype=float)
    return np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g)


def ricci_scalar(R: np.ndarray, metric: MetricAtPoint):
    """``(S, S_op, tau)``; ``S_op[a, b] = g^{ac} S_cb`` is the Ricci endomorphism."""
    S = np.einsum("kl,iklj->ij", metric.g_inv, R)
    S = 0.5 * (S + S.T)
    S_op = metric.g_inv @ S
    tau = float(np.einsum("ij,ij->", metric.g_inv, S))
    return S, S_op, tau


def weyl(R: np.ndarray, S: np.ndarray, tau: float, metric: MetricAtPoint) -> np.ndarray:
    n = metric.n
    if n < 3:
        raise ValueError("the Weyl tensor needs dimension >= 3")
    g = metric.g
    # g(V1,V4) S(V2,V3) - g(V1,V3) S(V2,V4) + g(V2,V3) S(V1,V4) - g(V2,V4) S(V1,V3)
    gS = (
        np.einsum("il,jk->ijkl", g, S)
        - np.einsum("ik,jl->ijkl", g, S)
        + np.einsum("jk,il->ijkl", g, S)
        - np.einsum("jl,ik->ijkl", g, S)
    )
    return R - gS / (n - 2) + tau * g_tensor(g) / ((n - 1) * (n - 2))


def _endomorphisms(B: np.ndarray, metric: MetricAtPoint) -> np.ndarray:
    """``A[x, y, m, v]``: component m of ``B(d_x, d_y) d_v`` with ``g(B(X,Y)V, W) = B(X,Y,V,W)``."""
    return np.einsum("mw,xyvw->xymv", metric.g_inv, B)


def _derive(T: np.ndarray, B: np.ndarray, metric: MetricAtPoint) -> np.ndarray:
    k = T.ndim
    if k not in (2, 4):
        raise ValueError(f"derivations are implemented for rank 2 and 4, got rank {k}")
    A = _endomorphisms(B, metric)
    n = metric.n
    out = np.zeros((n,) * (k + 2))
    for s in range(k):
        # T(..., A(X,Y) V_s, ...): contract slot s of T with the upper index of A
        term = np.tensordot(T, A, axes=([s], [2]))  # remaining T slots, x, y, v
        # move v back to position s; x, y stay last
        term = np.moveaxis(term, k + 1, s)
        out -= term
    return out


def derive_by_curvature(T: np.ndarray, R: np.ndarray, metric: MetricAtPoint) -> np.ndarray:
    """``R . T`` for a (0,2) or (0,4) tensor, two appended slots ``(X, Y)``."""
    return _derive(np.asarray(T, dtype=float), R, metric)


def derive_by_wedge(T: np.ndarray, metric: MetricAtPoint) -> np.ndarray:
    """``(^_g) . T``: the same derivation with ``X ^_g Y`` as the endomorphism."""
    return _derive(np.asarray(T, dtype=float), g_tensor(metric), metric)


@dataclass(frozen=True)
class CurvaturePack:
    point: tuple[float, ...]
    metric: MetricAtPoint
    gamma: np.ndarray
    R: np.ndarray
    G: np.ndarray
    S: np.ndarray
    S_op: np.ndarray
    tau: float
    C: np.ndarray | None
    RR: np.ndarray
    TachR: np.ndarray
    RS: np.ndarray
    TachS: np.ndarray

    @property
    def n(self) -> int:
        return self.metric.n

    def invariant_residuals(self) -> dict[str, float]:
        res = {f"R.{k}": v for k, v in curvature_symmetry_residuals(self.R).items()}
        res.update({f"G.{k}": v for k, v in curvature_symmetry_residuals(self.G).items()})
        if self.C is not None:
            res.update({f"C.{k}": v for k, v in curvature_symmetry_residuals(self.C).items()})
            scale = 1.0 + float(np.max(np.abs(self.R)))
            ginv = self.metric.g_inv
            traces = [
                np.einsum("ab,abkl->kl", ginv, self.C),
                np.einsum("ab,akbl->kl", ginv, self.C),
                np.einsum("ab,aklb->kl", ginv, self.C),
                np.einsum("ab,kabl->kl", ginv, self.C),
                np.einsum("ab,kalb->kl", ginv, self.C),
                np.einsum("ab,klab->kl", ginv, self.C),
            ]
            res["C.trace"] = max(float(np.max(np.abs(t))) for t in traces) / scale
        res["S.sym"] = float(np.max(np.abs(self.S - self.S.T)))
        for name, T in (("RR", self.RR), ("TachR", self.TachR)):
            scale = 1.0 + float(np.max(np.abs(T)))
            res[f"{name}.antisym56"] = float(np.max(np.abs(T + T.swapaxes(4, 5)))) / scale
            res[f"{name}.antisym12"] = float(np.max(np.abs(T + T.swapaxes(0, 1)))) / scale
            res[f"{name}.antisym34"] = float(np.max(np.abs(T + T.swapaxes(2, 3)))) / scale
            res[f"{name}.pair"] = float(np.max(np.abs(T - T.transpose(2, 3, 0, 1, 4, 5)))) / scale
        return res

    def verify(self, tol: float = 1e-9) -> None:
        bad = {k: v for k, v in self.invariant_residuals().items() if not v <= tol}
        if bad:
            raise NumericalError(f"curvature identities violated at {self.point}: {bad}")


def pack_from_jets(point, g, dg, ddg, verify: bool = False) -> CurvaturePack:
    metric = MetricAtPoint.from_matrix(g, point)
    gamma, R = riemann_from_jets(metric.g, dg, ddg)
    G = g_tensor(metric)
    S, S_op, tau = ricci_scalar(R, metric)
    C = weyl(R, S, tau, metric) if metric.n >= 3 else None
    pack = CurvaturePack(
        point=tuple(float(x) for x in point),
        metric=metric,
        gamma=gamma,
        R=R,
        G=G,
        S=S,
        S_op=S_op,
        tau=tau,
        C=C,
        RR=derive_by_curvature(R, R, metric),
        TachR=derive_by_wedge(R, metric),
        RS=derive_by_curvature(S, R, metric),
        TachS=derive_by_wedge(S, metric),
    )
    if verify:
        pack.verify()
    return pack


def curvature_pack(m: MetricField, point: Sequence[float], verify: bool = False) -> CurvaturePack:
    """All curvature data of ``m`` at ``point``. ``verify`` re-checks the algebraic identities."""
    g, dg, ddg = m.jets_at(point)
    return pack_from_jets(point, g, dg, ddg, verify=verify)
