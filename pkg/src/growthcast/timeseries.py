"""Time series of a growing quantity: ingestion, validation, transforms.

A :class:`TimeSeries` is an immutable pair of arrays (times in calendar
years, observed sizes) with a label and a unit. Times must be strictly
increasing and all values finite; violations raise at construction so
downstream gradient code never sees bad spacing.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, TextIO, Union

import numpy as np

from .errors import ConfigError, DomainError, ParseError, ValidationError


class TransformKind(Enum):
    """Elementwise value transform: natural log or reciprocal."""

    LOG = "log"
    RECIPROCAL = "reciprocal"


@dataclass(frozen=True)
class TimeSeries:
    """Ordered (time, value) observations of a growing entity.

    times are real-valued calendar years (fractional allowed), strictly
    increasing, at least two of them; values must all be finite.
    """

    times: np.ndarray
    values: np.ndarray
    label: str = ""
    unit: str = ""

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1 or times.shape != values.shape:
            raise ValidationError("times and values must be 1-d arrays of equal length")
        if times.size < 2:
            raise ValidationError(f"a series needs at least 2 points, got {times.size}")
        if not np.all(np.isfinite(times)):
            raise ValidationError("times contain non-finite entries")
        if not np.all(np.isfinite(values)):
            raise ValidationError("values contain non-finite entries")
        dt = np.diff(times)
        if np.any(dt <= 0):
            bad = int(np.argmax(dt <= 0))
            raise ValidationError(
                f"times must be strictly increasing; violation between "
                f"t={times[bad]} and t={times[bad + 1]}"
            )
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def points(self) -> Iterable[tuple[float, float]]:
        return zip(self.times.tolist(), self.values.tolist())


def load_series(
    source: Union[str, Path, TextIO],
    time_column: str,
    value_column: str,
    *,
    delimiter: str = ",",
    label: str | None = None,
    unit: str | None = None,
) -> TimeSeries:
    """Read a delimited text table into a validated TimeSeries.

    The file must carry a header row naming its columns; lines starting
    with '#' above the header are treated as ``key: value`` metadata and
    may supply the label and unit (explicit arguments win). Rows are
    expected in time order; duplicated or non-increasing times are an
    error rather than being silently sorted, since reordering hides
    data-entry mistakes that corrupt gradients.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return load_series(
                fh, time_column, value_column,
                delimiter=delimiter, label=label, unit=unit,
            )

    meta: dict[str, str] = {}
    body_lines: list[str] = []
    for raw in source:
        stripped = raw.strip()
        if not body_lines and (not stripped or stripped.startswith("#")):
            if stripped.startswith("#"):
                text = stripped.lstrip("#").strip()
                if ":" in text:
                    key, _, val = text.partition(":")
                    meta[key.strip()] = val.strip()
            continue
        body_lines.append(raw)
    if not body_lines:
        raise ParseError("input contains no header row")

    reader = csv.DictReader(io.StringIO("".join(body_lines)), delimiter=delimiter)
    fieldnames = reader.fieldnames or []
    for col in (time_column, value_column):
        if col not in fieldnames:
            raise ConfigError(
                f"column {col!r} not found; available columns: {fieldnames}"
            )

    times: list[float] = []
    values: list[float] = []
    for idx, row in enumerate(reader, start=2):  # header is row 1
        for col, sink in ((time_column, times), (value_column, values)):
            cell = row.get(col)
            if cell is None or cell.strip() == "":
                raise ParseError(f"row {idx}: empty cell in column {col!r}")
            try:
                sink.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"row {idx}: cannot parse {cell!r} in column {col!r} as a number"
                ) from None

    if len(times) < 2:
        raise ValidationError(f"a series needs at least 2 rows, got {len(times)}")
    for i in range(1, len(times)):
        if times[i] <= times[i - 1]:
            kind = "duplicated" if times[i] == times[i - 1] else "non-increasing"
            raise ValidationError(
                f"row {i + 2}: {kind} time {times[i]} (previous {times[i - 1]})"
            )
    return TimeSeries(
        times=np.array(times),
        values=np.array(values),
        label=label if label is not None else meta.get("label", ""),
        unit=unit if unit is not None else meta.get("unit", ""),
    )


def transform_series(ts: TimeSeries, kind: TransformKind) -> TimeSeries:
    """Replace values elementwise by ln(value) or 1/value.

    Times are unchanged; the unit string is annotated with the transform.
    LOG requires every value > 0, RECIPROCAL every value != 0.
    """
    if kind is TransformKind.LOG:
        if np.any(ts.values <= 0):
            bad = int(np.argmax(ts.values <= 0))
            raise DomainError(
                f"log transform requires positive values; value "
                f"{ts.values[bad]} at t={ts.times[bad]}"
            )
        new_values = np.log(ts.values)
        new_unit = f"ln({ts.unit})" if ts.unit else "ln"
    elif kind is TransformKind.RECIPROCAL:
        if np.any(ts.values == 0):
            bad = int(np.argmax(ts.values == 0))
            raise DomainError(f"reciprocal transform hit a zero value at t={ts.times[bad]}")
        new_values = 1.0 / ts.values
        new_unit = f"1/({ts.unit})" if ts.unit else "1/"
    else:  # pragma: no cover - enum is exhaustive
        raise ConfigError(f"unknown transform {kind!r}")
    return TimeSeries(times=ts.times, values=new_values, label=ts.label, unit=new_unit)
