"""Dense tensors at a point.

Tensors are plain ``numpy`` arrays of shape ``(n,) * k``. Curvature tensors are
stored fully covariant in the coordinate basis; where a slot is contravariant
the caller passes a variance string such as ``"ulll"`` (``u`` upper, ``l`` lower).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NumericalError


@dataclass(frozen=True)
class MetricAtPoint:
    g: np.ndarray
    g_inv: np.ndarray
    point: tuple[float, ...] = ()
    frame: np.ndarray = field(default=None, repr=False)

    @classmethod
    def from_matrix(cls, g, point: Sequence[float] = ()) -> "MetricAtPoint":
        g = np.array(g, dtype=float)
        g = 0.5 * (g + g.T)
        try:
            chol = np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise NumericalError("metric is not positive definite") from None
        g_inv = np.linalg.inv(g)
        g_inv = 0.5 * (g_inv + g_inv.T)
        # columns are a g-orthonormal frame: E^T g E = I
        frame = np.linalg.inv(chol).T
        return cls(g, g_inv, tuple(float(x) for x in point), frame)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def dot(self, u, v) -> float:
        return float(np.asarray(u) @ self.g @ np.asarray(v))

    def norm(self, u) -> float:
        return float(np.sqrt(max(self.dot(u, u), 0.0)))


def _check_shape(A: np.ndarray, n: int):
    if any(d != n for d in A.shape):
        raise ValueError(f"tensor shape {A.shape} does not match dimension {n}")


def raise_index(A: np.ndarray, slot: int, metric: MetricAtPoint) -> np.ndarray:
    """Raise one covariant slot with ``g_inv``."""
    return np.moveaxis(np.tensordot(metric.g_inv, A, axes=([1], [slot])), 0, slot)


def lower_index(A: np.ndarray, slot: int, metric: MetricAtPoint) -> np.ndarray:
    return np.moveaxis(np.tensordot(metric.g, A, axes=([1], [slot])), 0, slot)


def _all_raised(A: np.ndarray, metric: MetricAtPoint, variance: str) -> np.ndarray:
    out = A
    for slot, v in enumerate(variance):
        if v == "l":
            out = raise_index(out, slot, metric)
    return out


def inner_product(A, B, metric: MetricAtPoint, variance: str | None = None) -> float:
    """Full contraction ``<A, B>`` with every index pair routed through g or g_inv.

    ``variance`` gives the common variance signature of A and B (default all
    covariant). The result is symmetric in A, B and positive definite.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != B.ndim:
        raise ValueError(f"rank mismatch: {A.ndim} vs {B.ndim}")
    if A.ndim == 0:
        return float(A * B)
    _check_shape(A, metric.n)
    _check_shape(B, metric.n)
    variance = variance or "l" * A.ndim
    if len(variance) != A.ndim or set(variance) - {"u", "l"}:
        raise ValueError(f"bad variance signature {variance!r}")
    # raise every covariant slot of A, lower every contravariant slot
    Ar = A
    for slot, v in enumerate(variance):
        Ar = raise_index(Ar, slot, metric) if v == "l" else lower_index(Ar, slot, metric)
    return float(np.tensordot(Ar, B, axes=A.ndim))


def frobenius_norm(A, metric: MetricAtPoint, variance: str | None = None) -> float:
    return float(np.sqrt(max(inner_product(A, A, metric, variance), 0.0)))


def to_frame(A: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Components of a covariant tensor on the frame vectors (columns of ``frame``)."""
    out = np.asarray(A, dtype=float)
    for slot in range(out.ndim):
        out = np.moveaxis(np.tensordot(frame, out, axes=([0], [slot])), 0, slot)
    return out


def evaluate(A: np.ndarray, *vectors) -> float:
    """``A(v1, ..., vk)`` for a covariant tensor."""
    out = np.asarray(A, dtype=float)
    if len(vectors) != out.ndim:
        raise ValueError(f"need {out.ndim} vectors, got {len(vectors)}")
    for v in vectors:
        out = np.tensordot(np.asarray(v, dtype=float), out, axes=([0], [0]))
    return float(out)


def within(residual: float, tol: float, scale: float = 0.0) -> bool:
    """Relative acceptance rule: ``residual <= tol * (1 + scale)``."""
    return residual <= tol * (1.0 + scale)


def curvature_symmetry_residuals(T: np.ndarray) -> dict[str, float]:
    """Max-abs violations of the algebraic curvature identities of a (0,4) tensor."""
    scale = 1.0 + float(np.max(np.abs(T))) if T.size else 1.0
    bianchi = T + np.einsum("ijkl->jkil", T) + np.einsum("ijkl->kijl", T)
    return {
        "antisym12": float(np.max(np.abs(T + T.transpose(1, 0, 2, 3)))) / scale,
        "antisym34": float(np.max(np.abs(T + T.transpose(0, 1, 3, 2)))) / scale,
        "pair": float(np.max(np.abs(T - T.transpose(2, 3, 0, 1)))) / scale,
        "bianchi": float(np.max(np.abs(bianchi))) / scale,
    }
