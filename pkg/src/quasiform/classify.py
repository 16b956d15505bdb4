"""Pointwise and aggregate classification of curvature data."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import planes as pl
from .curvature import CurvaturePack
from .errors import NumericalError
from .tensors import MetricAtPoint, frobenius_norm, inner_product, to_frame, within

# label vocabulary
FLAT = "flat"
CC = "CC"
EINSTEIN = "Einstein"
QE = "quasi-Einstein"
QCC = "QCC"
WEYL_ZERO = "weyl-zero"
CONF_FLAT = "conformally-flat"
SEMI_SYMMETRIC = "semi-symmetric"
DESZCZ = "Deszcz"
RICCI_DESZCZ = "Ricci-Deszcz"
ANISOTROPIC = "anisotropic"
CC_BOUNDARY = "CC-boundary"
GENERIC = "generic"

STRUCTURE_LABELS = (CC, EINSTEIN, QE, QCC, SEMI_SYMMETRIC, DESZCZ, RICCI_DESZCZ)


@dataclass(frozen=True)
class ClassifyConfig:
    tol_cluster: float = 1e-6
    tol_label: float = 1e-8
    tol_distinct: float = 1e-6
    tol_const: float = 1e-7
    tol_dep: float = 1e-7
    plane_budget: int = 200
    seed: int = 42

    def __post_init__(self):
        for name in ("tol_cluster", "tol_label", "tol_distinct", "tol_const", "tol_dep"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.plane_budget < 1:
            raise ValueError("plane_budget must be >= 1")

    def as_dict(self) -> dict:
        return {
            "tol_cluster": self.tol_cluster,
            "tol_label": self.tol_label,
            "tol_distinct": self.tol_distinct,
            "tol_const": self.tol_const,
            "tol_dep": self.tol_dep,
            "plane_budget": self.plane_budget,
            "seed": self.seed,
        }


# --- Ricci spectrum --------------------------------------------------------


@dataclass(frozen=True)
class RicciSpectrum:
    values: tuple[float, ...]  # cluster means, descending
    mults: tuple[int, ...]
    bases: tuple[np.ndarray, ...]  # columns: g-orthonormal eigenvectors of each cluster
    eigenvalues: tuple[float, ...]

    @property
    def n_clusters(self) -> int:
        return len(self.values)

    def frame(self) -> np.ndarray:
        return np.hstack(self.bases)


def ricci_spectrum(S_op: np.ndarray, metric: MetricAtPoint, tol_cluster: float = 1e-6) -> RicciSpectrum:
    """Eigen-decomposition of the Ricci endomorphism, with eigenvalues merged into clusters."""
    E = metric.frame
    # in a g-orthonormal frame the endomorphism is a symmetric matrix
    sym = E.T @ metric.g @ S_op @ E
    sym = 0.5 * (sym + sym.T)
    try:
        w, V = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as err:
        raise NumericalError(f"Ricci eigensolver failed: {err}") from None
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    gap = tol_cluster * (1.0 + float(np.max(np.abs(w))))
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if abs(w[i] - w[groups[-1][-1]]) <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    bases = []
    for grp in groups:
        vecs = [E @ V[:, i] for i in grp]
        bases.append(np.column_stack(pl.gram_schmidt(vecs, metric)))
    return RicciSpectrum(
        values=tuple(float(np.mean(w[grp])) for grp in groups),
        mults=tuple(len(grp) for grp in groups),
        bases=tuple(bases),
        eigenvalues=tuple(float(x) for x in w),
    )


# --- Deszcz fit ------------------------------------------------------------


def fit_L(RR: np.ndarray, TachR: np.ndarray, metric: MetricAtPoint, tol: float = 1e-8, scale: float = 0.0):
    """Least-squares ``L`` in ``R.R = L (^_g . R)``.

    Returns ``(L, residual)``; ``L`` is ``None`` when the Tachibana tensor vanishes
    (``tol * (1 + scale)``, ``scale`` = |R|), i.e. the point has constant curvature
    and the space is trivially Deszcz symmetric there.
    """
    tt = inner_product(TachR, TachR, metric)
    rr_norm = frobenius_norm(RR, metric)
    if math.sqrt(max(tt, 0.0)) <= tol * (1.0 + scale):
        return None, rr_norm / (1.0 + rr_norm)
    L = inner_product(RR, TachR, metric) / tt
    return L, frobenius_norm(RR - L * TachR, metric) / (1.0 + rr_norm)


def verify_ricci_deszcz(pack: CurvaturePack, L: float | None) -> float:
    """``|R.S - L (^_g . S)| / (1 + |R.S|)``; an undefined L counts as 0."""
    lam = 0.0 if L is None else L
    rs_norm = frobenius_norm(pack.RS, pack.metric)
    return frobenius_norm(pack.RS - lam * pack.TachS, pack.metric) / (1.0 + rs_norm)


# --- quasi constant curvature ----------------------------------------------


@dataclass(frozen=True)
class QccStructure:
    q: int
    D: np.ndarray  # columns
    D_perp: np.ndarray
    K_bar: float
    K_perp: float
    K: float | None
    rho: float
    rho_perp: float
    residual_planes: float
    midpoint_residual: float | None
    distinct: bool

    def as_dict(self) -> dict:
        return {"q": self.q, "K": self.K, "Kperp": self.K_perp, "Kbar": self.K_bar}


@dataclass(frozen=True)
class NotQcc:
    reason: str
    residual: float | None = None
    candidate: QccStructure | None = None

    def __bool__(self) -> bool:
        return False


def detect_qcc(
    pack: CurvaturePack,
    spectrum: RicciSpectrum,
    plane_budget: int = 200,
    seed: int = 42,
    tol: float = 1e-8,
    tol_distinct: float = 1e-6,
) -> QccStructure | NotQcc:
    """Extract (q, D, D_perp, K, K_perp, K_bar) from the Ricci eigenspaces and validate it on random planes."""
    if spectrum.n_clusters != 2:
        return NotQcc(f"{spectrum.n_clusters} Ricci clusters")
    n = pack.n
    i_d = 0 if spectrum.mults[0] <= spectrum.mults[1] else 1
    D, Dp = spectrum.bases[i_d], spectrum.bases[1 - i_d]
    q = D.shape[1]
    R, G = pack.R, pack.G
    K_bar = pl.sectional(R, G, (D[:, 0], Dp[:, 0]))
    K_perp = pl.sectional(R, G, (Dp[:, 0], Dp[:, 1]))
    K = pl.sectional(R, G, (D[:, 0], D[:, 1])) if q > 1 else None
    scale = 1.0 + abs(K_bar) + abs(K_perp) + (abs(K) if K is not None else 0.0)

    # random planes drawn in the orthonormal frame (D | D_perp); there a plane's
    # principal angles to D are the singular values of its first q coordinates
    Rf = to_frame(R, np.column_stack([D, Dp]))
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((plane_budget, n, 2)))
    v, w = Q[:, :, 0], Q[:, :, 1]
    measured = np.einsum("ijkl,bi,bj,bk,bl->b", Rf, v, w, w, v, optimize=True)
    sv = np.clip(np.linalg.svd(Q[:, :q, :], compute_uv=False), 0.0, 1.0)
    c2 = sv[:, 0] ** 2
    if q == 1:
        predicted = K_bar * c2 + K_perp * (1 - c2)
    else:
        c2p = sv[:, 1] ** 2
        predicted = K * c2 * c2p + K_perp * (1 - c2) * (1 - c2p) + K_bar * (c2 * (1 - c2p) + (1 - c2) * c2p)
    worst = float(np.max(np.abs(measured - predicted)))
    residual = worst / scale
    midpoint = abs(K_bar - (K + K_perp) / 2) / scale if q > 1 else None

    gap = tol_distinct * scale
    distinct = abs(K_bar - K_perp) > gap and (q == 1 or abs(K - K_perp) > gap)
    structure = QccStructure(
        q=q,
        D=D,
        D_perp=Dp,
        K_bar=K_bar,
        K_perp=K_perp,
        K=K,
        rho=spectrum.values[i_d],
        rho_perp=spectrum.values[1 - i_d],
        residual_planes=residual,
        midpoint_residual=midpoint,
        distinct=distinct,
    )
    if residual > tol:
        return NotQcc("sectional curvatures do not follow the quasi-constant model", residual, structure)
    if midpoint is not None and midpoint > tol:
        return NotQcc("K_bar differs from (K + K_perp)/2", midpoint, structure)
    if not distinct:
        return NotQcc("curvature functions not distinct", residual, structure)
    return structure


# --- per-point diagnostics for the theorem checks --------------------------


def lemma_residual(pack: CurvaturePack, spectrum: RicciSpectrum) -> float:
    """Largest |R| on Ricci-eigenframe 4-tuples with at least three distinct members."""
    Rf = to_frame(pack.R, spectrum.frame())
    n = pack.n
    worst = 0.0
    for idx in itertools.product(range(n), repeat=4):
        if len(set(idx)) >= 3:
            worst = max(worst, abs(Rf[idx]))
    return worst / (1.0 + float(np.max(np.abs(Rf))))


def qcc_diagnostics(pack: CurvaturePack, qcc: QccStructure, L: float | None) -> dict[str, float]:
    """Residuals of the Ricci bookkeeping, the direction profiles and the six-argument identities."""
    n, q = pack.n, qcc.q
    metric, S = pack.metric, pack.S
    K, Kp, Kb = qcc.K, qcc.K_perp, qcc.K_bar
    scale = 1.0 + abs(Kb) + abs(Kp) + (abs(K) if K is not None else 0.0)
    rho_model, rho_perp_model = pl.ricci_endpoints(q, n, K, Kp, Kb)
    U, Up = qcc.D[:, 0], qcc.D_perp[:, 0]
    out = {
        "rho_D_model": abs(qcc.rho - rho_model) / scale,
        "rho_perp_model": abs(qcc.rho_perp - rho_perp_model) / scale,
        "tau_split": abs(pack.tau - (q * qcc.rho + (n - q) * qcc.rho_perp)) / (1.0 + abs(pack.tau)),
    }
    psis = np.linspace(0.0, math.pi / 2, 91)
    sampled = []
    prof_err = 0.0
    dir_err = 0.0
    for psi in psis:
        u = math.cos(psi) * U + math.sin(psi) * Up
        val = pl.ricci_direction(S, u, metric)
        sampled.append(val)
        prof_err = max(prof_err, abs(val - pl.ricci_profile(q, n, K, Kp, Kb, psi)))
        dir_err = max(dir_err, abs(val - pl.direction_profile(qcc.rho, qcc.rho_perp, psi)))
    sampled = np.array(sampled)
    out["profile"] = prof_err / scale
    out["direction_profile"] = dir_err / scale
    ends = {0, len(psis) - 1}
    # extrema attained only at the endpoints: the profile is strictly monotone in between
    interior = sampled[1:-1]
    lo, hi = min(sampled[0], sampled[-1]), max(sampled[0], sampled[-1])
    margin = 1e-12 * scale
    out["profile_extrema_at_ends"] = float(
        int(np.argmax(sampled)) in ends
        and int(np.argmin(sampled)) in ends
        and bool(np.all(interior > lo - margin))
        and bool(np.all(interior < hi + margin))
    )
    X, Xp, Yp = qcc.D[:, 0], qcc.D_perp[:, 0], qcc.D_perp[:, 1]
    tach, rr = pl.six_argument_values(pack, X, Xp, Yp)
    out["six_tach"] = tach
    out["six_rr"] = rr
    out["six_tach_model"] = abs(tach - (Kp - Kb)) / scale
    out["six_rr_model"] = abs(rr - Kb * (Kp - Kb)) / scale**2
    out["prop"] = abs(L - Kb) / scale if L is not None else float("inf")
    Kc = pl.weyl_sectional(Kb, qcc.rho, qcc.rho_perp, pack.tau, n)
    out["weyl_sectional_bar"] = abs(Kc) / scale
    return out


# --- point classification --------------------------------------------------


@dataclass(frozen=True)
class PointClassification:
    point: tuple[float, ...]
    n: int
    labels: tuple[str, ...]
    residuals: dict[str, float]
    L: float | None
    c: float | None
    spectrum: RicciSpectrum
    qcc: QccStructure | None
    not_qcc_reason: str | None = None
    diagnostics: dict[str, float] = field(default_factory=dict)

    def has(self, label: str) -> bool:
        return label in self.labels


def classify_point(pack: CurvaturePack, config: ClassifyConfig = ClassifyConfig()) -> PointClassification:
    metric, n = pack.metric, pack.n
    tol = config.tol_label
    labels: set[str] = set()
    R_norm = frobenius_norm(pack.R, metric)
    G_norm2 = inner_product(pack.G, pack.G, metric)
    c = inner_product(pack.R, pack.G, metric) / G_norm2
    res = {
        "R": R_norm,
        "R_minus_cG": frobenius_norm(pack.R - c * pack.G, metric) / (1.0 + R_norm),
        "TachR": frobenius_norm(pack.TachR, metric) / (1.0 + R_norm),
        "RR": frobenius_norm(pack.RR, metric) / (1.0 + R_norm**2),
    }
    if pack.C is not None:
        res["C"] = frobenius_norm(pack.C, metric) / (1.0 + R_norm)

    if R_norm <= tol:
        labels.add(FLAT)
    is_cc = res["R_minus_cG"] <= tol
    if is_cc:
        labels.add(CC)

    spectrum = ricci_spectrum(pack.S_op, metric, config.tol_cluster)
    if spectrum.n_clusters == 1:
        labels.add(EINSTEIN)
    elif spectrum.n_clusters == 2:
        labels.add(QE)
    else:
        labels.add(ANISOTROPIC)

    if pack.C is not None and res["C"] <= tol:
        labels.add(WEYL_ZERO)
        if n >= 4:
            labels.add(CONF_FLAT)
    if res["RR"] <= tol:
        labels.add(SEMI_SYMMETRIC)

    L, fit_res = fit_L(pack.RR, pack.TachR, metric, tol, R_norm)
    res["deszcz"] = 0.0 if L is None else fit_res
    if L is None or fit_res <= tol:
        labels.add(DESZCZ)

    # Ricci-Deszcz: R.S = L_S (^_g . S) for some L_S
    tachS_norm = frobenius_norm(pack.TachS, metric)
    S_norm = frobenius_norm(pack.S, metric)
    rs_norm = frobenius_norm(pack.RS, metric)
    if tachS_norm <= tol * (1.0 + S_norm):
        L_S, rs_res = None, rs_norm / (1.0 + rs_norm)
    else:
        L_S = inner_product(pack.RS, pack.TachS, metric) / tachS_norm**2
        rs_res = frobenius_norm(pack.RS - L_S * pack.TachS, metric) / (1.0 + rs_norm)
    res["ricci_deszcz"] = rs_res
    if rs_res <= tol:
        labels.add(RICCI_DESZCZ)
    res["RS_minus_L_TachS"] = verify_ricci_deszcz(pack, L)

    qcc = None
    reason = None
    diagnostics: dict[str, float] = {}
    if spectrum.n_clusters == 2:
        found = detect_qcc(pack, spectrum, config.plane_budget, config.seed, tol, config.tol_distinct)
        if found:
            qcc = found
            labels.add(QCC)
            res["qcc_planes"] = found.residual_planes
            if found.midpoint_residual is not None:
                res["qcc_midpoint"] = found.midpoint_residual
            diagnostics.update(qcc_diagnostics(pack, found, L))
        else:
            reason = found.reason
            if found.residual is not None:
                res["qcc_planes"] = found.residual
            if found.candidate is not None and not found.candidate.distinct:
                labels.add(CC_BOUNDARY)
        diagnostics["lemma"] = lemma_residual(pack, spectrum)
    else:
        reason = f"{spectrum.n_clusters} Ricci clusters"

    if not labels & set(STRUCTURE_LABELS):
        labels.add(GENERIC)

    return PointClassification(
        point=pack.point,
        n=n,
        labels=tuple(sorted(labels)),
        residuals=res,
        L=L,
        c=c if is_cc else None,
        spectrum=spectrum,
        qcc=qcc,
        not_qcc_reason=reason,
        diagnostics=diagnostics,
    )


# --- aggregation -----------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    metric_name: str
    n: int
    points: tuple[PointClassification, ...]
    labels: tuple[str, ...]
    constant_type: float | None
    L_range: tuple[float, float] | None
    flags: tuple[str, ...]
    config: ClassifyConfig
    sample: dict

    def has(self, label: str) -> bool:
        return label in self.labels


def aggregate(
    points: Sequence[PointClassification],
    config: ClassifyConfig = ClassifyConfig(),
    metric_name: str = "metric",
    sample: dict | None = None,
) -> ClassificationReport:
    """Fold point classifications in order: a label holds globally iff it holds at every point."""
    if not points:
        raise ValueError("cannot aggregate an empty sample")
    labels = set(points[0].labels)
    for p in points[1:]:
        labels &= set(p.labels)
    flags = []
    qs = {p.qcc.q if p.qcc else min(p.spectrum.mults) for p in points if p.spectrum.n_clusters == 2}
    if len(qs) > 1 or (qs and any(p.spectrum.n_clusters != 2 for p in points)):
        flags.append("non-constant multiplicity")
        labels -= {QE, QCC}
    if any(p.has(CC_BOUNDARY) for p in points):
        flags.append("CC-boundary points")
        labels -= {QCC}

    Ls = [p.L for p in points if p.L is not None]
    L_range = (min(Ls), max(Ls)) if Ls else None
    constant_type = None
    if DESZCZ in labels and Ls:
        if len(Ls) != len(points):
            flags.append("L undefined at some points")
        else:
            mean = sum(Ls) / len(Ls)
            spread = max(abs(x - mean) for x in Ls)
            if within(spread, config.tol_const, abs(mean)):
                constant_type = mean
            else:
                flags.append("non-constant L")
    if GENERIC not in labels and not labels & set(STRUCTURE_LABELS):
        labels.add(GENERIC)
    return ClassificationReport(
        metric_name=metric_name,
        n=points[0].n,
        points=tuple(points),
        labels=tuple(sorted(labels)),
        constant_type=constant_type,
        L_range=L_range,
        flags=tuple(flags),
        config=config,
        sample=dict(sample or {}),
    )
