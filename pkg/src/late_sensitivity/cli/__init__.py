"""Command-line interface for LATE sensitivity analysis."""

from .main import main

__all__ = ["main"]
