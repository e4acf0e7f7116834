"""Lexical and structural style metrics for C-family source files."""

from .metrics import CATALOG_VERSION, METRIC_IDS, FeatureVector, MetricDescriptor, catalog, compute_metrics
from .structure import StructuralFacts, scan_structure
from .tokenizer import Token, lex, read_source, tokenize

__all__ = ["CATALOG_VERSION", "METRIC_IDS", "FeatureVector", "MetricDescriptor", "StructuralFacts", "Token",
           "catalog", "compute_metrics", "lex", "read_source", "scan_structure", "tokenize"]
