"""Executable checks of the structure results relating curvature classes.

Each public check id maps to one or two directional implications. An
implication is evaluated pointwise over classified sample points: a point
where the premise holds and the conclusion fails is a counterexample. These
are instance checks over the sampled metrics, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import catalog
from . import classify as cl
from .report import classify_metric

PASS = "PASS"
FAIL = "FAIL"
NA = "NOT-APPLICABLE"

HEADER = "instance check: implications are tested on sampled points of the listed metrics, not proved"


@dataclass(frozen=True)
class Ctx:
    """What a premise or conclusion can look at: one classified point of one metric."""

    point: cl.PointClassification
    report: cl.ClassificationReport
    expected: catalog.Expected | None

    def has(self, label: str) -> bool:
        return self.point.has(label)

    def res(self, key: str) -> float:
        return self.point.residuals.get(key, math.inf)

    def diag(self, key: str) -> float:
        return self.point.diagnostics.get(key, math.inf)


Premise = Callable[[Ctx], bool]
Conclusion = Callable[[Ctx], "tuple[bool, float]"]


@dataclass(frozen=True)
class Implication:
    id: str
    direction: str  # "=>" or "<="
    premise: Premise
    conclusion: Conclusion
    text: str


@dataclass(frozen=True)
class TheoremCheck:
    id: str
    anchor: str
    direction: str  # "=>" or "<=>"
    dims: Callable[[int], bool]
    parts: tuple[Implication, ...]
    needs_constant_multiplicity: bool = False
    tol: float | None = None

    def applies_to(self, report: cl.ClassificationReport) -> bool:
        if not self.dims(report.n):
            return False
        if self.needs_constant_multiplicity and "non-constant multiplicity" in report.flags:
            return False
        return True


@dataclass
class PartResult:
    id: str
    status: str
    worst_residual: float
    premise_points: int
    checked_points: int
    witnesses: list[dict] = field(default_factory=list)


@dataclass
class CheckResult:
    id: str
    status: str
    worst_residual: float
    parts: list[PartResult]
    metrics: list[str]

    @property
    def witnesses(self) -> list[dict]:
        return [w for p in self.parts for w in p.witnesses]

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "status": self.status,
            "worst_residual": self.worst_residual,
            "metrics": self.metrics,
            "parts": [
                {
                    "id": p.id,
                    "status": p.status,
                    "worst_residual": p.worst_residual,
                    "premise_points": p.premise_points,
                    "checked_points": p.checked_points,
                    "witnesses": p.witnesses,
                }
                for p in self.parts
            ],
        }


# --- clause helpers --------------------------------------------------------

_LABEL_RESIDUAL = {
    cl.CC: "R_minus_cG",
    cl.QCC: "qcc_planes",
    cl.DESZCZ: "deszcz",
    cl.RICCI_DESZCZ: "ricci_deszcz",
    cl.SEMI_SYMMETRIC: "RR",
    cl.WEYL_ZERO: "C",
    cl.FLAT: "R",
}


def _label(label: str) -> Conclusion:
    key = _LABEL_RESIDUAL.get(label)

    def concl(ctx: Ctx):
        r = ctx.res(key) if key else (0.0 if ctx.has(label) else math.inf)
        return ctx.has(label), r

    return concl


def _any(*labels: str) -> Conclusion:
    parts = [_label(lab) for lab in labels]

    def concl(ctx: Ctx):
        outs = [p(ctx) for p in parts]
        return any(o[0] for o in outs), min(o[1] for o in outs)

    return concl


def _all(*labels: str) -> Premise:
    return lambda ctx: all(ctx.has(lab) for lab in labels)


def _either(*labels: str) -> Premise:
    return lambda ctx: any(ctx.has(lab) for lab in labels)


def _diag_within(keys: Sequence[str], tol: float) -> Conclusion:
    def concl(ctx: Ctx):
        worst = max(ctx.diag(k) for k in keys)
        return worst <= tol, worst

    return concl


def _always(ctx: Ctx) -> bool:
    return True


def _weyl_zero(ctx: Ctx) -> bool:
    return ctx.has(cl.WEYL_ZERO)


def _product_form(ctx: Ctx, tol: float) -> tuple[bool, float]:
    """Either constant curvature, M^q(c) x M^{n-q}(-c), or M^{n-1}(c) x curve."""
    if ctx.has(cl.CC):
        return True, ctx.res("R_minus_cG")
    qc = ctx.point.qcc
    if qc is None:
        return False, math.inf
    scale = 1.0 + abs(qc.K_bar) + abs(qc.K_perp) + (abs(qc.K) if qc.K is not None else 0.0)
    if qc.q == 1:
        r = abs(qc.K_bar) / scale
        return r <= tol and abs(qc.K_perp) > tol, r
    r = max(abs(qc.K + qc.K_perp), abs(qc.K_bar)) / scale
    return r <= tol and abs(qc.K) > tol, r


def _iff(cid: str, left: Premise, right_c: Conclusion, right_p: Premise, left_c: Conclusion, lt: str, rt: str):
    return (
        Implication(f"{cid}=>", "=>", left, right_c, f"{lt} => {rt}"),
        Implication(f"{cid}<=", "<=", right_p, left_c, f"{rt} => {lt}"),
    )


def _with(base: Premise, extra: Premise) -> Premise:
    return lambda ctx: extra(ctx) and base(ctx)


def _and_concl(a: Conclusion, b: Conclusion) -> Conclusion:
    def concl(ctx):
        x, y = a(ctx), b(ctx)
        return x[0] and y[0], max(x[1], y[1])

    return concl


def _conf_euclidean_known(ctx: Ctx) -> bool:
    return ctx.expected is not None and ctx.expected.conformally_euclidean is not None


def _conf_euclidean(ctx: Ctx) -> tuple[bool, float]:
    ok = bool(ctx.expected and ctx.expected.conformally_euclidean)
    return ok, 0.0 if ok else math.inf


def _build_checks() -> dict[str, TheoremCheck]:
    n3 = lambda n: n == 3  # noqa: E731
    n4 = lambda n: n >= 4  # noqa: E731
    n_any = lambda n: n >= 3  # noqa: E731
    tk_tol = 1e-7
    checks = [
        TheoremCheck(
            "T1", "conformally flat quasi-Einstein iff quasi space form (n >= 4)", "<=>", n4,
            _iff(
                "T1",
                _all(cl.WEYL_ZERO, cl.QE), _label(cl.QCC),
                _all(cl.QCC), _and_concl(_label(cl.WEYL_ZERO), _label(cl.QE)),
                "C=0 and quasi-Einstein", "QCC",
            ),
        ),
        TheoremCheck(
            "T2", "quasi-Einstein iff quasi space form (n = 3)", "<=>", n3,
            _iff("T2", _all(cl.QE), _label(cl.QCC), _all(cl.QCC), _label(cl.QE), "quasi-Einstein", "QCC"),
        ),
        TheoremCheck(
            "T3", "Deszcz symmetric iff real or quasi space form (n = 3)", "<=>", n3,
            _iff(
                "T3",
                _all(cl.DESZCZ), _any(cl.CC, cl.QCC),
                _either(cl.CC, cl.QCC), _label(cl.DESZCZ),
                "Deszcz", "CC or QCC",
            ),
        ),
        TheoremCheck(
            "T4", "conformally flat: Deszcz symmetric iff real or quasi space form (n >= 4)", "<=>", n4,
            _iff(
                "T4",
                _all(cl.WEYL_ZERO, cl.DESZCZ), _any(cl.CC, cl.QCC),
                _with(_either(cl.CC, cl.QCC), _weyl_zero), _label(cl.DESZCZ),
                "C=0 and Deszcz", "C=0 and (CC or QCC)",
            ),
        ),
        TheoremCheck(
            "PROP", "quasi space forms are Deszcz symmetric with L = K_bar", "=>", n_any,
            (Implication("PROP=>", "=>", _all(cl.QCC), _diag_within(("prop",), 1e-7), "QCC => L = K_bar"),),
        ),
        TheoremCheck(
            "TK", "semi-symmetric with C=0: space form, opposite-curvature product, or space form times a curve", "<=>", n_any,
            (
                Implication(
                    "TK=>", "=>", _all(cl.WEYL_ZERO, cl.SEMI_SYMMETRIC),
                    lambda ctx: _product_form(ctx, tk_tol),
                    "C=0 and R.R=0 => CC, M^q(c) x M^{n-q}(-c) or M^{n-1}(c) x curve",
                ),
                Implication(
                    "TK<=", "<=", lambda ctx: _product_form(ctx, tk_tol)[0],
                    _and_concl(_label(cl.WEYL_ZERO), _label(cl.SEMI_SYMMETRIC)),
                    "product form => C=0 and R.R=0",
                ),
            ),
            needs_constant_multiplicity=True,
        ),
        TheoremCheck(
            "TL", "C=0: Deszcz symmetric iff Ricci Deszcz symmetric with the same L", "<=>", n_any,
            (
                Implication(
                    "TL=>", "=>", _all(cl.WEYL_ZERO, cl.DESZCZ),
                    lambda ctx: (ctx.res("RS_minus_L_TachS") <= 1e-7, ctx.res("RS_minus_L_TachS")),
                    "C=0 and R.R = L (^g.R) => R.S = L (^g.S)",
                ),
                Implication(
                    "TL<=", "<=", _all(cl.WEYL_ZERO, cl.RICCI_DESZCZ), _label(cl.DESZCZ),
                    "C=0 and Ricci-Deszcz => Deszcz",
                ),
            ),
            needs_constant_multiplicity=True,
        ),
        TheoremCheck(
            "EQ1617", "six-argument Tachibana and R.R values on a quasi space form", "=>", n_any,
            (Implication("EQ1617=>", "=>", _all(cl.QCC), _diag_within(("six_tach_model", "six_rr_model"), 1e-7),
                         "QCC => (K_perp - K_bar, K_bar (K_perp - K_bar))"),),
        ),
        TheoremCheck(
            "PROFILE", "Ricci bookkeeping and direction profile of a quasi space form", "=>", n_any,
            (
                Implication(
                    "PROFILE=>", "=>", _all(cl.QCC),
                    _and_concl(
                        _diag_within(("rho_D_model", "rho_perp_model", "tau_split", "profile", "direction_profile"), 1e-8),
                        lambda ctx: (ctx.diag("profile_extrema_at_ends") == 1.0, 0.0),
                    ),
                    "QCC => Ricci identities, profile, extrema at psi in {0, pi/2}",
                ),
            ),
        ),
        TheoremCheck(
            "TE", "Einstein iff real space form (n = 3)", "<=>", n3,
            _iff("TE", _all(cl.EINSTEIN), _label(cl.CC), _all(cl.CC), _label(cl.EINSTEIN), "Einstein", "CC"),
        ),
        TheoremCheck(
            "TF", "Deszcz symmetric iff Einstein or quasi-Einstein (n = 3)", "<=>", n3,
            _iff(
                "TF",
                _all(cl.DESZCZ), _any(cl.EINSTEIN, cl.QE),
                _either(cl.EINSTEIN, cl.QE), _label(cl.DESZCZ),
                "Deszcz", "Einstein or quasi-Einstein",
            ),
            needs_constant_multiplicity=True,
        ),
        TheoremCheck(
            "TG", "C vanishes in dimension 3", "=>", n3,
            (Implication("TG=>", "=>", _always, _label(cl.WEYL_ZERO), "n=3 => C=0"),),
        ),
        TheoremCheck(
            "TH", "C=0 iff conformally Euclidean (n >= 4, known charts only)", "<=>", n4,
            (
                Implication(
                    "TH=>", "=>", lambda ctx: _conf_euclidean_known(ctx) and _conf_euclidean(ctx)[0],
                    _label(cl.WEYL_ZERO), "conformally Euclidean => C=0",
                ),
                Implication(
                    "TH<=", "<=", lambda ctx: _conf_euclidean_known(ctx) and ctx.has(cl.WEYL_ZERO),
                    _conf_euclidean, "C=0 => conformally Euclidean",
                ),
            ),
        ),
        TheoremCheck(
            "TI", "conformally flat: Deszcz symmetric iff Einstein or quasi-Einstein (n >= 4)", "<=>", n4,
            _iff(
                "TI",
                _all(cl.WEYL_ZERO, cl.DESZCZ), _any(cl.EINSTEIN, cl.QE),
                _with(_either(cl.EINSTEIN, cl.QE), _weyl_zero), _label(cl.DESZCZ),
                "C=0 and Deszcz", "C=0 and (Einstein or quasi-Einstein)",
            ),
            needs_constant_multiplicity=True,
        ),
        TheoremCheck(
            "TJ", "conformally flat Einstein iff real space form (n >= 4)", "<=>", n4,
            _iff(
                "TJ",
                _all(cl.WEYL_ZERO, cl.EINSTEIN), _label(cl.CC),
                _all(cl.CC), _and_concl(_label(cl.WEYL_ZERO), _label(cl.EINSTEIN)),
                "C=0 and Einstein", "CC",
            ),
        ),
        TheoremCheck(
            "LEMMA", "C=0 quasi-Einstein: R vanishes on Ricci-frame 4-tuples with three distinct members", "=>", n_any,
            (Implication("LEMMA=>", "=>", _all(cl.WEYL_ZERO, cl.QE), _diag_within(("lemma",), 1e-8),
                         "C=0 and quasi-Einstein => R(e_a, e_b, e_c, e_d) = 0"),),
        ),
    ]
    return {c.id: c for c in checks}


CHECKS: dict[str, TheoremCheck] = _build_checks()


def get_check(check_id: str) -> TheoremCheck:
    try:
        return CHECKS[check_id.upper()]
    except KeyError:
        raise KeyError(f"unknown check {check_id!r}; known: {', '.join(CHECKS)}") from None


def default_subset(check: TheoremCheck) -> list[str]:
    """Catalog entries whose dimension the check covers."""
    return [name for name, e in catalog.CATALOG.items() if check.dims(e.metric.n)]


def _witness(ctx: Ctx, part: Implication, residual: float) -> dict:
    return {
        "metric": ctx.report.metric_name,
        "point": list(ctx.point.point),
        "labels": list(ctx.point.labels),
        "implication": part.text,
        "residual": residual,
    }


def run_check(
    check: TheoremCheck,
    reports: Iterable[tuple[cl.ClassificationReport, catalog.Expected | None]],
    max_witnesses: int = 5,
) -> CheckResult:
    """PASS if some point meets a premise and no point violates a conclusion;
    FAIL with witnesses on a violation; NOT-APPLICABLE if every premise is vacuous."""
    reports = list(reports)
    applicable = [(r, e) for r, e in reports if check.applies_to(r)]
    parts = []
    for part in check.parts:
        pr = PartResult(part.id, NA, 0.0, 0, 0)
        for rep, exp in applicable:
            for p in rep.points:
                ctx = Ctx(p, rep, exp)
                pr.checked_points += 1
                if not part.premise(ctx):
                    continue
                pr.premise_points += 1
                ok, residual = part.conclusion(ctx)
                if math.isfinite(residual):
                    pr.worst_residual = max(pr.worst_residual, residual)
                if not ok:
                    pr.status = FAIL
                    if len(pr.witnesses) < max_witnesses:
                        pr.witnesses.append(_witness(ctx, part, residual))
        if pr.status != FAIL and pr.premise_points:
            pr.status = PASS
        parts.append(pr)
    statuses = {p.status for p in parts}
    status = FAIL if FAIL in statuses else PASS if PASS in statuses else NA
    return CheckResult(
        id=check.id,
        status=status,
        worst_residual=max((p.worst_residual for p in parts), default=0.0),
        parts=parts,
        metrics=[r.metric_name for r, _ in applicable],
    )


_REPORT_CACHE: dict = {}


def catalog_report(name: str, config: cl.ClassifyConfig, samples: int) -> cl.ClassificationReport:
    """Classified catalog metric, memoized per (name, config, samples)."""
    key = (name, config, samples)
    if key not in _REPORT_CACHE:
        entry = catalog.get(name)
        _REPORT_CACHE[key] = classify_metric(entry.metric, config, samples, source=f"catalog:{name}")
    return _REPORT_CACHE[key]


def verify(
    check_id: str,
    names: Sequence[str] | None = None,
    config: cl.ClassifyConfig = cl.ClassifyConfig(),
    samples: int = 50,
    extra: Sequence[cl.ClassificationReport] = (),
) -> CheckResult:
    """Run one check over catalog entries (default: those of matching dimension) plus user reports."""
    check = get_check(check_id)
    if names is None:
        names = default_subset(check) if not extra else []
    pairs = [(catalog_report(n, config, samples), catalog.get(n).expected) for n in names]
    pairs += [(r, None) for r in extra]
    return run_check(check, pairs)


def render_result(result: CheckResult) -> str:
    check = CHECKS[result.id]
    lines = [
        f"{result.id}: {result.status}   worst residual {result.worst_residual:.3e}",
        f"  {check.anchor}",
        f"  {HEADER}",
        f"  metrics: {', '.join(result.metrics) or '(none applicable)'}",
    ]
    for p in result.parts:
        lines.append(
            f"  {p.id:10s} {p.status:15s} premise at {p.premise_points}/{p.checked_points} points, worst {p.worst_residual:.3e}"
        )
        for w in p.witnesses:
            pt = ", ".join(f"{x:.6g}" for x in w["point"])
            lines.append(f"    counterexample {w['metric']} at ({pt}): {w['implication']} (residual {w['residual']:.3e})")
    return "\n".join(lines) + "\n"
