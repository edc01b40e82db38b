"""Observed sample of (Y, D, Z) rows."""

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class SampleData:
    """n observations of outcome y, binary treatment d and binary instrument z."""

    y: np.ndarray
    d: np.ndarray
    z: np.ndarray

    def __post_init__(self) -> None:
        """Coerce columns to arrays and validate them."""
        y = np.array(self.y, dtype=float)
        d = np.asarray(self.d)
        z = np.asarray(self.z)
        if y.ndim != 1 or d.ndim != 1 or z.ndim != 1:
            raise ValueError("y, d and z must be one-dimensional")
        if not (len(y) == len(d) == len(z)):
            raise ValueError(
                f"Columns differ in length: y={len(y)}, d={len(d)}, z={len(z)}"
            )
        if len(y) == 0:
            raise ValueError("Sample must contain at least one row")
        if not np.all(np.isfinite(y)):
            raise ValueError("Outcome y must be finite")
        for name, column in (("d", d), ("z", z)):
            if not np.all(np.isin(column, (0, 1))):
                raise ValueError(f"Column {name} must be binary (0/1)")

        # Frozen dataclass: bypass __setattr__ to store normalized copies
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "d", d.astype(np.int8))
        object.__setattr__(self, "z", z.astype(np.int8))
        for column in (self.y, self.d, self.z):
            column.setflags(write=False)

    @classmethod
    def from_rows(cls, rows: Iterable[Tuple[float, int, int]]) -> "SampleData":
        """Build from (y, d, z) tuples."""
        materialized = list(rows)
        if not materialized:
            raise ValueError("Sample must contain at least one row")
        y, d, z = zip(*materialized)
        return cls(y=np.array(y, dtype=float), d=np.array(d), z=np.array(z))

    @property
    def n(self) -> int:
        return len(self.y)

    def __len__(self) -> int:
        return self.n

    @property
    def is_binary_outcome(self) -> bool:
        return bool(np.all(np.isin(self.y, (0.0, 1.0))))

    def take(self, indices: np.ndarray) -> "SampleData":
        """Rows at the given indices (used for resampling)."""
        return SampleData(y=self.y[indices], d=self.d[indices], z=self.z[indices])

    def with_outcome(self, y: np.ndarray) -> "SampleData":
        return SampleData(y=y, d=self.d, z=self.z)

    def rows(self) -> Iterable[Tuple[float, int, int]]:
        for y, d, z in zip(self.y, self.d, self.z):
            yield float(y), int(d), int(z)
