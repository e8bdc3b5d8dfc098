"""Core series/decomposition types, CSV ingestion, scaling and seed plumbing.

Everything here is immutable after construction and safe to share between
workers. Indexing follows the 1-based convention used throughout the rest
of the package (segment offsets, warping paths, CSV columns).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np


class DataError(ValueError):
    """Raised when an input file or series violates ingestion contracts."""


# ---------------------------------------------------------------------------
# Seed plumbing
# ---------------------------------------------------------------------------

RngSeed = int  # 64-bit unsigned seed; identical seeds give bit-identical streams


def derive_seed(seed: RngSeed, *key: int) -> int:
    """Derive a child seed as a pure function of (seed, key).

    Children with distinct keys are statistically independent, so work can be
    farmed out per (component, trial, step, ...) and executed in any order
    without changing results.
    """
    ss = np.random.SeedSequence(seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def spawn_rng(seed: RngSeed, *key: int) -> np.random.Generator:
    """Build an independent Generator from a root seed and stream key."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real-valued sequence with optional per-point labels.

    Parameters
    ----------
    values : array_like
        Finite real samples, in time order.
    labels : sequence of str, optional
        Per-point identifiers (e.g. years, timestamps). Must match length.
    """

    values: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64).copy()
        if arr.ndim != 1 or arr.size < 1:
            raise DataError("series must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise DataError("series contains NaN or infinite values")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != arr.size:
                raise DataError(
                    f"labels length {len(labels)} != series length {arr.size}"
                )
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.values.size)

    def replace_values(self, values) -> "TimeSeries":
        """New series with the same labels and different values."""
        return TimeSeries(values, self.labels)


@dataclass(frozen=True)
class Decomposition:
    """Ordered intrinsic mode functions plus residual trend.

    IMFs are ordered fastest-fluctuating first; the residual is the monotone
    remainder and may be treated as the last (slowest) component.
    """

    imfs: tuple
    residual: TimeSeries
    source_length: int

    def __post_init__(self):
        object.__setattr__(self, "imfs", tuple(self.imfs))
        for i, imf in enumerate(self.imfs):
            if len(imf) != self.source_length:
                raise ValueError(
                    f"imf {i + 1} length {len(imf)} != source length {self.source_length}"
                )
        if len(self.residual) != self.source_length:
            raise ValueError("residual length != source length")

    @property
    def n_imfs(self) -> int:
        return len(self.imfs)

    def components(self) -> list:
        """IMFs in order, residual appended last."""
        return list(self.imfs) + [self.residual]

    def reconstruct(self) -> np.ndarray:
        """Pointwise sum of all IMFs and the residual."""
        total = self.residual.values.copy()
        for imf in self.imfs:
            total += imf.values
        return total


@dataclass(frozen=True)
class FrequencySplit:
    """Partition of decomposition components into fast (high) and slow (low).

    The first ``p_count`` components are the hard-to-predict fast ones; the
    remaining ``q_count`` (always ending with the residual) are predicted
    directly. p_count + q_count equals the total component count.
    """

    high: tuple
    low: tuple
    p_count: int
    q_count: int

    def __post_init__(self):
        object.__setattr__(self, "high", tuple(self.high))
        object.__setattr__(self, "low", tuple(self.low))
        if self.p_count != len(self.high) or self.q_count != len(self.low):
            raise ValueError("split counts do not match component lists")
        if self.q_count < 1:
            raise ValueError("at least one low-frequency component is required")


# ---------------------------------------------------------------------------
# Min-max scaling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinMaxScale:
    """Affine map onto [0, 1] with exact inverse.

    Degenerate (constant) inputs map to 0.5 everywhere; the inverse then
    returns the stored constant regardless of input.
    """

    lo: float
    hi: float
    degenerate: bool = False

    def transform(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.degenerate:
            return np.full_like(x, 0.5)
        return (x - self.lo) / (self.hi - self.lo)

    def inverse(self, y):
        y = np.asarray(y, dtype=np.float64)
        if self.degenerate:
            return np.full_like(y, self.lo)
        return self.lo + y * (self.hi - self.lo)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "degenerate": self.degenerate}

    @classmethod
    def from_dict(cls, d: dict) -> "MinMaxScale":
        return cls(lo=float(d["lo"]), hi=float(d["hi"]), degenerate=bool(d["degenerate"]))

    @classmethod
    def identity(cls) -> "MinMaxScale":
        return cls(lo=0.0, hi=1.0, degenerate=False)


def minmax_normalize(series: TimeSeries) -> tuple:
    """Scale a series onto [0, 1] and return the invertible scale parameters.

    Parameters
    ----------
    series : TimeSeries
        Input of length >= 2.

    Returns
    -------
    scaled : TimeSeries
        Values in [0, 1]; all 0.5 for a constant input.
    scale : MinMaxScale
        Stores (min, max) and the degenerate-range flag.
    """
    if len(series) < 2:
        raise ValueError("normalization needs at least 2 points")
    lo = float(series.values.min())
    hi = float(series.values.max())
    scale = MinMaxScale(lo=lo, hi=hi, degenerate=(hi == lo))
    return series.replace_values(scale.transform(series.values)), scale


# ---------------------------------------------------------------------------
# CSV ingestion / emission
# ---------------------------------------------------------------------------

def _parse_cell(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(
            f"row {row}, column {column}: cannot parse {cell!r} as a number"
        ) from None
    if not np.isfinite(value):
        raise DataError(f"row {row}, column {column}: non-finite value {cell!r}")
    return value


def load_csv(
    path: Union[str, Path],
    column: Union[str, int] = 1,
    has_header: bool = False,
) -> TimeSeries:
    """Load one numeric column of a CSV file as a TimeSeries.

    Parameters
    ----------
    path : str or Path
        CSV file, UTF-8, comma-separated, '.' decimal separator.
    column : str or int
        Header name (requires ``has_header``) or 1-based column number.
    has_header : bool
        Whether the first row is a header.

    Returns
    -------
    TimeSeries
        Values in file row order. When the selected column is not the first,
        the first column supplies per-point labels.

    Raises
    ------
    DataError
        Missing file, unknown column, unparseable cell (reported with its
        row and column), or empty series.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"empty file: {path}")

    header = None
    if has_header:
        header = rows[0]
        rows = rows[1:]
    if not rows:
        raise DataError(f"no data rows in {path}")

    if isinstance(column, str):
        if header is None:
            raise DataError(f"column name {column!r} given but file has no header")
        try:
            col_idx = header.index(column)
        except ValueError:
            raise DataError(f"column {column!r} not found in header {header}") from None
        col_name = column
    else:
        col_idx = int(column) - 1  # columns are numbered from 1
        if col_idx < 0:
            raise DataError(f"column number must be >= 1, got {column}")
        col_name = str(column)

    values = []
    labels = []
    first_row_offset = 2 if has_header else 1
    for i, row in enumerate(rows):
        if col_idx >= len(row):
            raise DataError(
                f"row {i + first_row_offset}, column {col_name}: missing cell"
            )
        values.append(_parse_cell(row[col_idx].strip(), i + first_row_offset, col_name))
        if col_idx != 0:
            labels.append(row[0])
    return TimeSeries(values, labels if labels else None)


def format_number(x: float) -> str:
    """Round-trip-safe decimal rendering (shortest repr)."""
    return repr(float(x))


def write_csv(
    series: TimeSeries,
    path: Union[str, Path],
    value_header: Optional[str] = None,
    label_header: str = "label",
) -> None:
    """Emit a series as CSV with round-trip-safe number formatting."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if series.labels is not None:
            if value_header is not None:
                writer.writerow([label_header, value_header])
            for label, v in zip(series.labels, series.values):
                writer.writerow([label, format_number(v)])
        else:
            if value_header is not None:
                writer.writerow([value_header])
            for v in series.values:
                writer.writerow([format_number(v)])
