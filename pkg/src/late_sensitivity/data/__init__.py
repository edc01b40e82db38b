"""Sample CSV files, JSON documents and built-in fixtures."""

from .documents import (
    dgp_to_document,
    forge_to_document,
    parse_dgp,
    parse_model_document,
    to_canonical_json,
)
from .fixtures import PUBLISHED_SUMMARIES, builtin_binary_base, builtin_continuous_base
from .sample_loader import load_sample_csv, write_sample_csv

__all__ = [
    "dgp_to_document",
    "forge_to_document",
    "parse_dgp",
    "parse_model_document",
    "to_canonical_json",
    "PUBLISHED_SUMMARIES",
    "builtin_binary_base",
    "builtin_continuous_base",
    "load_sample_csv",
    "write_sample_csv",
]
