"""Utilities for LATE sensitivity analysis."""

from .exceptions import (
    BootstrapFailedError,
    ConfigurationError,
    DataLoadError,
    DocumentError,
    FileOperationError,
    ForgeError,
    IdentificationError,
    LateSensitivityError,
    PreconditionViolatedError,
    RefuseToRunError,
    ValidationError,
)
from .file_utils import read_text, save_text, validate_output_path, write_output
from .validation import validate_config, validate_finite, validate_probability

__all__ = [
    "BootstrapFailedError",
    "ConfigurationError",
    "DataLoadError",
    "DocumentError",
    "FileOperationError",
    "ForgeError",
    "IdentificationError",
    "LateSensitivityError",
    "PreconditionViolatedError",
    "RefuseToRunError",
    "ValidationError",
    "read_text",
    "save_text",
    "validate_output_path",
    "write_output",
    "validate_config",
    "validate_finite",
    "validate_probability",
]
