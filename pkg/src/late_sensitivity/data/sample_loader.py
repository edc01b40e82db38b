"""Observed-sample CSV loader and writer."""

import io
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from ..models.config import AnalysisConfig
from ..models.sample import SampleData
from ..utils.exceptions import DataLoadError
from ..utils.file_utils import STDIO_PATH, read_text, write_output

logger = logging.getLogger(__name__)

# Data rows start on line 2, after the header
FIRST_DATA_LINE = 2


def _line_numbers(frame: pd.DataFrame, mask: np.ndarray) -> list:
    # Frame labels still count the blank lines dropped after parsing
    return [int(i) + FIRST_DATA_LINE for i in frame.index[np.asarray(mask, dtype=bool)]]


def load_sample_csv(
    csv_path: Union[str, Path], config: Optional[AnalysisConfig] = None
) -> SampleData:
    """Load an observed sample (Y, D, Z) from a CSV file with a header row.

    Args:
        csv_path: Path to the CSV file, or '-' for standard input
        config: Column names; defaults to y, d and z

    Returns:
        SampleData with d and z in {0, 1}

    Raises:
        DataLoadError: If the file is empty, a column is missing, cells are missing
            or non-numeric (listing their line numbers), or d / z are not binary
        FileOperationError: If the file cannot be read
    """
    config = config or AnalysisConfig()
    source = "<stdin>" if str(csv_path) == STDIO_PATH else str(csv_path)
    text = read_text(csv_path)

    try:
        frame = pd.read_csv(
            io.StringIO(text), dtype=str, skipinitialspace=True, skip_blank_lines=False
        )
    except pd.errors.EmptyDataError as e:
        raise DataLoadError("file is empty", file_path=source, cause=e)
    except pd.errors.ParserError as e:
        raise DataLoadError(f"malformed CSV: {e}", file_path=source, cause=e)

    columns = {"y": config.y_col, "d": config.d_col, "z": config.z_col}
    missing = [name for name in columns.values() if name not in frame.columns]
    if missing:
        raise DataLoadError(
            f"missing column(s) {', '.join(missing)}; found {', '.join(map(str, frame.columns))}",
            file_path=source,
            column=missing[0],
        )
    frame = frame.loc[~frame.isna().all(axis=1)]
    if frame.empty:
        raise DataLoadError("file has a header but no data rows", file_path=source)

    values = {}
    for role, name in columns.items():
        numeric = pd.to_numeric(frame[name].str.strip(), errors="coerce")
        bad = numeric.isna() | ~np.isfinite(numeric.fillna(0.0))
        if bad.any():
            raise DataLoadError(
                "missing or non-numeric values",
                file_path=source,
                line_numbers=_line_numbers(frame, bad.to_numpy()),
                column=name,
            )
        values[role] = numeric.to_numpy(dtype=float)

    for role in ("d", "z"):
        non_binary = ~np.isin(values[role], (0.0, 1.0))
        if non_binary.any():
            raise DataLoadError(
                "values must be 0 or 1",
                file_path=source,
                line_numbers=_line_numbers(frame, non_binary),
                column=columns[role],
            )

    logger.info(f"Loaded {len(frame)} rows from {source}")
    return SampleData(y=values["y"], d=values["d"], z=values["z"])


def sample_to_csv(data: SampleData, y_col: str = "y", d_col: str = "d", z_col: str = "z") -> str:
    """CSV text for a sample; a 0/1 outcome is written as integers."""
    y = data.y.astype(int) if data.is_binary_outcome else data.y
    frame = pd.DataFrame({y_col: y, d_col: data.d.astype(int), z_col: data.z.astype(int)})
    return frame.to_csv(index=False, lineterminator="\n", float_format="%.17g")


def write_sample_csv(
    data: SampleData,
    output_path: Union[str, Path, None],
    y_col: str = "y",
    d_col: str = "d",
    z_col: str = "z",
) -> None:
    """Write a sample as CSV to a file, or to stdout for None / '-'."""
    write_output(sample_to_csv(data, y_col, d_col, z_col), output_path)
