"""Sampling a metric over its chart, running the classifier, and rendering reports."""

from __future__ import annotations

import json
import math
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from . import classify as cl
from .curvature import curvature_pack
from .errors import NumericalError
from .metric import MetricField

SCHEMA_VERSION = 1

_NUM = {"type": ["number", "null"]}
_NUM_LIST = {"type": "array", "items": {"type": "number"}}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "classification report",
    "type": "object",
    "required": ["schema_version", "metric", "config", "points", "aggregate"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "metric": {
            "type": "object",
            "required": ["name", "dim", "coords", "source"],
            "properties": {
                "name": {"type": "string"},
                "dim": {"type": "integer", "minimum": 1},
                "coords": {"type": "array", "items": {"type": "string"}},
                "source": {"type": "string"},
            },
        },
        "config": {
            "type": "object",
            "required": ["samples", "seed", "tol_cluster", "tol_label", "tol_distinct", "tol_const", "planes"],
        },
        "points": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["coords", "labels", "residuals", "L", "ricci", "qcc"],
                "additionalProperties": False,
                "properties": {
                    "coords": _NUM_LIST,
                    "labels": {"type": "array", "items": {"type": "string"}},
                    "residuals": {"type": "object", "additionalProperties": _NUM},
                    "L": _NUM,
                    "c": _NUM,
                    "ricci": {
                        "type": "object",
                        "required": ["values", "mults"],
                        "properties": {
                            "values": _NUM_LIST,
                            "mults": {"type": "array", "items": {"type": "integer"}},
                        },
                    },
                    "qcc": {
                        "oneOf": [
                            {"type": "null"},
                            {
                                "type": "object",
                                "required": ["q", "K", "Kperp", "Kbar"],
                                "properties": {
                                    "q": {"type": "integer", "minimum": 1},
                                    "K": _NUM,
                                    "Kperp": {"type": "number"},
                                    "Kbar": {"type": "number"},
                                },
                            },
                        ]
                    },
                    "not_qcc": {"type": ["string", "null"]},
                    "diagnostics": {"type": "object", "additionalProperties": _NUM},
                },
            },
        },
        "aggregate": {
            "type": "object",
            "required": ["labels", "constant_type", "L_range"],
            "properties": {
                "labels": {"type": "array", "items": {"type": "string"}},
                "constant_type": _NUM,
                "L_range": {"oneOf": [{"type": "null"}, {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]},
                "flags": {"type": "array", "items": {"type": "string"}},
            },
        },
    },
}


def sample_points(metric: MetricField, count: int, seed: int) -> list[tuple[float, ...]]:
    """Seeded scrambled Halton points scaled to the chart domain."""
    if count < 1:
        raise ValueError("sample count must be >= 1")
    lo = np.array([d[0] for d in metric.domain])
    hi = np.array([d[1] for d in metric.domain])
    unit = qmc.Halton(d=metric.n, scramble=True, seed=seed).random(count)
    pts = qmc.scale(unit, lo, hi) if metric.n > 0 else unit
    return [tuple(float(x) for x in row) for row in pts]


def classify_metric(
    metric: MetricField,
    config: cl.ClassifyConfig = cl.ClassifyConfig(),
    samples: int = 50,
    points: Sequence[Sequence[float]] | None = None,
    source: str = "",
) -> cl.ClassificationReport:
    if points:
        pts = [tuple(float(x) for x in p) for p in points]
        for p in pts:
            if len(p) != metric.n:
                raise ValueError(f"point {p} has {len(p)} coordinates, metric has {metric.n}")
        sample = {"kind": "explicit", "count": len(pts), "seed": config.seed}
    else:
        pts = sample_points(metric, samples, config.seed)
        sample = {"kind": "halton", "count": len(pts), "seed": config.seed}
    sample["source"] = source
    classified = []
    for p in pts:
        pack = curvature_pack(metric, p)
        if not all(np.all(np.isfinite(a)) for a in (pack.R, pack.RR, pack.TachR)):
            raise NumericalError(f"non-finite curvature at {p}")
        classified.append(cl.classify_point(pack, config))
    return cl.aggregate(classified, config, metric.name, sample)


# --- serialization ---------------------------------------------------------


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _num_dict(d: dict) -> dict:
    return {k: _num(v) for k, v in sorted(d.items())}


def point_to_dict(p: cl.PointClassification) -> dict:
    return {
        "coords": [float(x) for x in p.point],
        "labels": list(p.labels),
        "residuals": _num_dict(p.residuals),
        "L": _num(p.L),
        "c": _num(p.c),
        "ricci": {"values": [float(v) for v in p.spectrum.values], "mults": list(p.spectrum.mults)},
        "qcc": {k: _num(v) if k != "q" else v for k, v in p.qcc.as_dict().items()} if p.qcc else None,
        "not_qcc": p.not_qcc_reason,
        "diagnostics": _num_dict(p.diagnostics),
    }


def report_to_dict(report: cl.ClassificationReport, metric: MetricField) -> dict:
    cfg = report.config
    return {
        "schema_version": SCHEMA_VERSION,
        "metric": {
            "name": report.metric_name,
            "dim": report.n,
            "coords": list(metric.coords),
            "source": report.sample.get("source", ""),
        },
        "config": {
            "samples": report.sample.get("count"),
            "sampling": report.sample.get("kind"),
            "seed": cfg.seed,
            "tol_cluster": cfg.tol_cluster,
            "tol_label": cfg.tol_label,
            "tol_distinct": cfg.tol_distinct,
            "tol_const": cfg.tol_const,
            "tol_dep": cfg.tol_dep,
            "planes": cfg.plane_budget,
        },
        "points": [point_to_dict(p) for p in report.points],
        "aggregate": {
            "labels": list(report.labels),
            "constant_type": _num(report.constant_type),
            "L_range": [float(x) for x in report.L_range] if report.L_range else None,
            "flags": list(report.flags),
        },
    }


def render_json(report: cl.ClassificationReport, metric: MetricField) -> str:
    return json.dumps(report_to_dict(report, metric), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(x) -> str:
    return "-" if x is None else repr(float(x))


def render_text(report: cl.ClassificationReport, metric: MetricField) -> str:
    """Human-readable report. Numbers are printed with ``repr`` so they match the JSON exactly."""
    d = report_to_dict(report, metric)
    agg = d["aggregate"]
    lines = [
        f"metric   {d['metric']['name']}  (dim {d['metric']['dim']}, coords {', '.join(d['metric']['coords'])})",
        f"sample   {d['config']['sampling']} x{d['config']['samples']}, seed {d['config']['seed']}",
        "tol      "
        + "  ".join(f"{k}={d['config'][k]!r}" for k in ("tol_cluster", "tol_label", "tol_distinct", "tol_const")),
        "",
        f"labels   {', '.join(agg['labels'])}",
    ]
    if agg["constant_type"] is not None:
        lines.append(f"L        constant type {_fmt(agg['constant_type'])}")
    elif agg["L_range"] is not None:
        lines.append(f"L        range [{_fmt(agg['L_range'][0])}, {_fmt(agg['L_range'][1])}]")
    for flag in agg["flags"]:
        lines.append(f"flag     {flag}")
    for i, p in enumerate(d["points"]):
        lines.append("")
        lines.append(f"point {i}  ({', '.join(_fmt(x) for x in p['coords'])})")
        lines.append(f"  labels   {', '.join(p['labels'])}")
        vals = ", ".join(f"{_fmt(v)} x{m}" for v, m in zip(p["ricci"]["values"], p["ricci"]["mults"]))
        lines.append(f"  ricci    {vals}")
        lines.append(f"  L        {_fmt(p['L'])}")
        if p["qcc"]:
            qc = p["qcc"]
            lines.append(f"  qcc      q={qc['q']} K={_fmt(qc['K'])} Kperp={_fmt(qc['Kperp'])} Kbar={_fmt(qc['Kbar'])}")
        elif p["not_qcc"]:
            lines.append(f"  qcc      no ({p['not_qcc']})")
        for k, v in p["residuals"].items():
            lines.append(f"  res      {k} = {_fmt(v)}")
    return "\n".join(lines) + "\n"


def parse_text_labels(text: str) -> tuple[list[str], list[list[str]]]:
    """Recover the aggregate and per-point label lists from a text report."""
    agg: list[str] = []
    per_point: list[list[str]] = []
    for line in text.splitlines():
        if line.startswith("labels   "):
            agg = [s for s in line[9:].split(", ") if s]
        elif line.startswith("  labels   "):
            per_point.append([s for s in line[11:].split(", ") if s])
    return agg, per_point
