"""CSV dataset ingestion for the command-line tools."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataset, ParseError
from .geometry import WeightedPointSet


@dataclass(frozen=True)
class Dataset:
    """Rectangular numeric data with named columns and optional masses."""

    columns: tuple[str, ...]
    values: np.ndarray
    masses: np.ndarray | None
    path: str

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.masses is not None:
            m = np.asarray(self.masses, dtype=float)
            m.setflags(write=False)
            object.__setattr__(self, "masses", m)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def point_set(self) -> WeightedPointSet:
        return WeightedPointSet(self.values, self.masses)


def _parse_cell(raw: str, row: int, column: str) -> float:
    text = raw.strip()
    if not text:
        raise ParseError(f"row {row}, column {column!r}: empty cell")
    try:
        value = float(text)
    except ValueError as exc:
        raise ParseError(
            f"row {row}, column {column!r}: not a decimal number: {text!r}"
        ) from exc
    if not math.isfinite(value):
        raise ParseError(f"row {row}, column {column!r}: non-finite value {text!r}")
    return value


def parse_dataset(
    path: str,
    cols: list[str] | None = None,
    mass_col: str | None = None,
) -> Dataset:
    """Read a CSV file with a header row into a Dataset.

    ``cols`` selects the coordinate columns in order (default: every column
    except the mass column); ``mass_col`` names an optional positive mass
    column.  NaN and infinite entries are rejected.
    """
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    except OSError as exc:
        raise ParseError(f"cannot read {path!r}: {exc}") from exc
    if not rows:
        raise EmptyDataset(f"{path!r} is empty")
    header = [name.strip() for name in rows[0]]
    body = rows[1:]
    if not body:
        raise EmptyDataset(f"{path!r} has a header but no data rows")
    index = {name: i for i, name in enumerate(header)}

    if mass_col is not None and mass_col not in index:
        raise ParseError(f"mass column {mass_col!r} not found in header {header}")
    if cols is None:
        cols = [name for name in header if name != mass_col]
    missing = [name for name in cols if name not in index]
    if missing:
        raise ParseError(f"columns {missing} not found in header {header}")

    values = np.empty((len(body), len(cols)))
    for r, row in enumerate(body):
        if len(row) != len(header):
            raise ParseError(
                f"row {r + 2}: expected {len(header)} cells, got {len(row)}"
            )
        for c, name in enumerate(cols):
            values[r, c] = _parse_cell(row[index[name]], r + 2, name)

    masses = None
    if mass_col is not None:
        masses = np.empty(len(body))
        for r, row in enumerate(body):
            masses[r] = _parse_cell(row[index[mass_col]], r + 2, mass_col)
        if np.any(masses <= 0):
            bad = int(np.flatnonzero(masses <= 0)[0])
            raise ParseError(f"row {bad + 2}, column {mass_col!r}: mass must be positive")

    return Dataset(tuple(cols), values, masses, path)
