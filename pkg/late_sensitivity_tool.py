#!/usr/bin/env python3
"""
LATE Sensitivity

A command-line tool for judging whether the sign of the complier LATE survives
a small share of defiers. Estimates the Wald ratio and the assumption-free
magnitude bound, classifies against the boundary |beta|(k1 - k2), and forges
observationally equivalent DGPs with the opposite sign.

Usage:
    python late_sensitivity_tool.py estimate data.csv --bootstrap 1000
    python late_sensitivity_tool.py boundary --preset jtpa

For detailed help:
    python late_sensitivity_tool.py --help
"""

import sys
from pathlib import Path

# Add src directory to path so we can import the package
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from late_sensitivity.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
