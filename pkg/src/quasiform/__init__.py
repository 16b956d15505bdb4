"""Curvature classification of Riemannian metrics given by component expressions."""

from .catalog import CATALOG
from .classify import ClassifyConfig, aggregate, classify_point
from .curvature import curvature_pack
from .errors import MetricSourceError, NumericalError
from .metric import MetricField, load_metric_file, parse_metric_source
from .report import classify_metric

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "ClassifyConfig",
    "MetricField",
    "MetricSourceError",
    "NumericalError",
    "aggregate",
    "classify_metric",
    "classify_point",
    "curvature_pack",
    "load_metric_file",
    "parse_metric_source",
]
