"""Command-line front end.

Exit codes: 0 success, 1 a verify check failed, 2 bad input (metric file,
unknown name), 3 numerical failure while evaluating curvature.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import catalog, theorems
from .classify import ClassifyConfig
from .errors import MetricSourceError, NumericalError
from .metric import format_metric, load_metric_file
from .report import classify_metric, render_json, render_text

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

USER_TOL_LABEL = 1e-5

CATALOG_LIST_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "catalog listing",
    "type": "array",
    "items": {
        "type": "object",
        "required": ["name", "dim", "description", "coords", "domain", "expected"],
        "properties": {
            "name": {"type": "string"},
            "dim": {"type": "integer"},
            "description": {"type": "string"},
            "thurston": {"type": "boolean"},
            "coords": {"type": "array", "items": {"type": "string"}},
            "domain": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
            "expected": {
                "type": "object",
                "required": ["labels", "absent", "provenance"],
                "properties": {
                    "labels": {"type": "array", "items": {"type": "string"}},
                    "absent": {"type": "array", "items": {"type": "string"}},
                    "provenance": {"type": "object", "additionalProperties": {"enum": ["literature", "derived", "trivial"]}},
                },
            },
        },
    },
}


def _point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerances must be > 0")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _add_run_options(p: argparse.ArgumentParser, multi_catalog: bool = False):
    src = p.add_mutually_exclusive_group(required=not multi_catalog)
    if multi_catalog:
        src.add_argument("--catalog", action="append", metavar="NAME", help="catalog entry (repeatable; default: all matching)")
    else:
        src.add_argument("--catalog", metavar="NAME", help="catalog entry")
    src.add_argument("--file", metavar="PATH", help="metric definition file")
    p.add_argument("--samples", type=_count, default=50)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol-cluster", type=_positive, default=1e-6)
    p.add_argument("--tol-label", type=_positive, default=None, help="default 1e-8 (catalog) or 1e-5 (--file)")
    p.add_argument("--tol-distinct", type=_positive, default=1e-6)
    p.add_argument("--tol-const", type=_positive, default=1e-7)
    p.add_argument("--tol-dep", type=_positive, default=1e-7)
    p.add_argument("--planes", type=_count, default=200, help="random planes per point for the QCC test")
    p.add_argument("--point", type=_point, action="append", metavar="X1,...,XN", help="explicit sample point (repeatable; write --point=-1,0 for a leading minus)")
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasiform", description="Curvature classification of Riemannian metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a metric over sampled points")
    _add_run_options(p)

    p = sub.add_parser("verify", help="run one structure check")
    p.add_argument("check_id", metavar="ID", help=", ".join(theorems.CHECKS))
    _add_run_options(p, multi_catalog=True)

    p = sub.add_parser("catalog", help="list or export built-in metrics")
    csub = p.add_subparsers(dest="catalog_command", required=True)
    lp = csub.add_parser("list")
    lp.add_argument("--json", action="store_true")
    lp.add_argument("--schema", action="store_true", help="print the JSON schema of the listing")
    ep = csub.add_parser("export")
    ep.add_argument("name")
    ep.add_argument("-o", "--output", metavar="PATH", help="write to a file instead of stdout")
    return parser


def _config(args) -> ClassifyConfig:
    tol_label = args.tol_label
    if tol_label is None:
        tol_label = USER_TOL_LABEL if args.file else 1e-8
    return ClassifyConfig(
        tol_cluster=args.tol_cluster,
        tol_label=tol_label,
        tol_distinct=args.tol_distinct,
        tol_const=args.tol_const,
        tol_dep=args.tol_dep,
        plane_budget=args.planes,
        seed=args.seed,
    )


def _load(args, name: str):
    if args.file:
        return load_metric_file(args.file), f"file:{args.file}"
    return catalog.get(name).metric, f"catalog:{name}"


def cmd_classify(args) -> int:
    metric, source = _load(args, args.catalog)
    report = classify_metric(metric, _config(args), args.samples, args.point, source=source)
    out = render_json(report, metric) if args.json else render_text(report, metric)
    sys.stdout.write(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _config(args)
    extra = []
    names = args.catalog
    if args.file:
        metric, source = _load(args, None)
        extra.append(classify_metric(metric, config, args.samples, args.point, source=source))
        names = []
    elif names:
        for n in names:
            catalog.get(n)
    result = theorems.verify(args.check_id, names, config, args.samples, extra)
    if args.json:
        sys.stdout.write(json.dumps(result.as_dict(), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(theorems.render_result(result))
    return EXIT_CHECK_FAILED if result.status == theorems.FAIL else EXIT_OK


def catalog_listing() -> list[dict]:
    out = []
    for name, e in catalog.CATALOG.items():
        m = e.metric
        out.append(
            {
                "name": name,
                "dim": m.n,
                "description": e.description,
                "thurston": e.thurston,
                "coords": list(m.coords),
                "domain": [list(d) for d in m.domain],
                "expected": e.expected.as_dict(),
            }
        )
    return out


def cmd_catalog(args) -> int:
    if args.catalog_command == "list":
        if args.schema:
            sys.stdout.write(json.dumps(CATALOG_LIST_SCHEMA, indent=2) + "\n")
        elif args.json:
            sys.stdout.write(json.dumps(catalog_listing(), indent=2) + "\n")
        else:
            for item in catalog_listing():
                exp = item["expected"]
                prov = ", ".join(f"{k}: {v}" for k, v in exp["provenance"].items())
                mark = "  [3D model geometry]" if item["thurston"] else ""
                print(f"{item['name']:<11s} n={item['dim']}  {item['description']}{mark}")
                print(f"{'':13s}expected: {', '.join(exp['labels'])}")
                if exp["absent"]:
                    print(f"{'':13s}absent:   {', '.join(exp['absent'])}")
                print(f"{'':13s}provenance: {prov}")
        return EXIT_OK
    text = format_metric(catalog.get(args.name).metric)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "classify":
            return cmd_classify(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_catalog(args)
    except MetricSourceError as exc:
        where = getattr(args, "file", None) or "input"
        print(f"error: {where}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
