"""Reading and writing the tool's delimited-text file formats.

Data files are UTF-8 delimited text with a header row and optional
``# key: value`` metadata lines above it. Model files are flat
``key = value`` records with the fixed field set
{kind, a, b, r, C, t_ref, unit}; fields a kind does not use are absent.

Everything written here is deterministic: floats are rendered with
repr (shortest exact round-trip) and no timestamps enter data files.
Run metadata goes into a ``.meta`` sidecar next to each output.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, ParseError
from .fitting import FitReport
from .forecast import Projection, ScenarioReport
from .models import Model, ModelKind, Params
from .rates import RateMethod, RateSeries
from .timeseries import TimeSeries

PathLike = Union[str, Path]

_MODEL_FIELDS = ("kind", "a", "b", "r", "C", "t_ref", "unit")


def _fmt(x: float) -> str:
    return repr(float(x))


def _meta_block(meta: dict[str, str]) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in meta.items() if v != "")


def write_series(path: PathLike, ts: TimeSeries, delimiter: str = ",") -> None:
    lines = [_meta_block({"label": ts.label, "unit": ts.unit})]
    lines.append(f"t{delimiter}value\n")
    for t, v in zip(ts.times, ts.values):
        lines.append(f"{_fmt(t)}{delimiter}{_fmt(v)}\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def write_rates(
    path: PathLike,
    rs: RateSeries,
    unit: str = "",
    transform: str = "",
    delimiter: str = ",",
) -> None:
    meta = {
        "label": rs.source_label,
        "method": rs.method.value,
        "transform": transform,
        "unit": unit,
    }
    lines = [_meta_block(meta), f"t{delimiter}rate{delimiter}size\n"]
    for t, r, s in zip(rs.times, rs.rates, rs.sizes):
        lines.append(f"{_fmt(t)}{delimiter}{_fmt(r)}{delimiter}{_fmt(s)}\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def _read_table(path: PathLike, delimiter: str) -> tuple[dict[str, str], list[str], list[list[str]]]:
    meta: dict[str, str] = {}
    header: Optional[list[str]] = None
    rows: list[list[str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            stripped = raw.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                if header is None and ":" in stripped:
                    key, _, val = stripped.lstrip("#").partition(":")
                    meta[key.strip()] = val.strip()
                continue
            cells = [c.strip() for c in stripped.split(delimiter)]
            if header is None:
                header = cells
            else:
                rows.append(cells)
    if header is None:
        raise ParseError(f"{path}: no header row found")
    return meta, header, rows


def read_rates(path: PathLike, delimiter: str = ",") -> tuple[RateSeries, dict[str, str]]:
    """Read a rates table (columns t, rate, size) plus its metadata."""
    meta, header, rows = _read_table(path, delimiter)
    for col in ("t", "rate"):
        if col not in header:
            raise ConfigError(f"{path}: rates file must have a {col!r} column, got {header}")
    it = header.index("t")
    ir = header.index("rate")
    isz = header.index("size") if "size" in header else None
    times, rates, sizes = [], [], []
    for n, cells in enumerate(rows, start=2):
        try:
            times.append(float(cells[it]))
            rates.append(float(cells[ir]))
            sizes.append(float(cells[isz]) if isz is not None else 1.0)
        except (ValueError, IndexError):
            raise ParseError(f"{path}: row {n}: cannot parse {cells!r}") from None
    method = RateMethod(meta.get("method", "direct")) if meta.get("method") else RateMethod.DIRECT
    rs = RateSeries(
        times=np.array(times),
        rates=np.array(rates),
        sizes=np.array(sizes),
        source_label=meta.get("label", ""),
        method=method,
    )
    return rs, meta


def write_model(path: PathLike, model: Model, comments: Sequence[str] = ()) -> None:
    lines = [f"# {c}\n" for c in comments]
    p = model.params
    record = {
        "kind": model.kind.value,
        "a": p.a,
        "b": p.b,
        "r": p.r,
        "C": p.C,
        "t_ref": model.t_ref,
        "unit": model.unit or None,
    }
    for key in _MODEL_FIELDS:
        val = record[key]
        if val is None:
            continue
        rendered = val if isinstance(val, str) else _fmt(val)
        lines.append(f"{key} = {rendered}\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_model(path: PathLike) -> Model:
    fields: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for n, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ParseError(f"{path}: line {n}: expected 'key = value', got {stripped!r}")
            key, _, val = stripped.partition("=")
            key = key.strip()
            if key not in _MODEL_FIELDS:
                raise ConfigError(
                    f"{path}: unknown model field {key!r}; expected one of {_MODEL_FIELDS}"
                )
            fields[key] = val.strip()
    if "kind" not in fields:
        raise ConfigError(f"{path}: model file is missing the 'kind' field")
    try:
        kind = ModelKind(fields.pop("kind"))
    except ValueError:
        valid = ", ".join(k.value for k in ModelKind)
        raise ConfigError(f"{path}: unknown model kind; valid kinds: {valid}") from None
    unit = fields.pop("unit", "")
    numeric: dict[str, float] = {}
    for key, val in fields.items():
        try:
            numeric[key] = float(val)
        except ValueError:
            raise ParseError(f"{path}: cannot parse {key} = {val!r} as a number") from None
    t_ref = numeric.pop("t_ref", 0.0)
    params = Params(
        a=numeric.get("a"), b=numeric.get("b"), r=numeric.get("r"), C=numeric.get("C")
    )
    return Model(kind=kind, params=params, t_ref=t_ref, unit=unit)


def fit_report_comments(report: FitReport) -> list[str]:
    """Human-readable '#' header lines summarizing a fit."""
    line = report.line
    out = [
        f"linearization: {report.linearization.value}",
        f"line: intercept = {_fmt(line.intercept)}, slope = {_fmt(line.slope)}",
        f"fit: r_squared = {_fmt(line.r_squared)}, rms_residual = {_fmt(line.rms_residual)}, "
        f"n_points = {line.n_points}, dropped_points = {line.dropped_points}",
    ]
    out.extend(f"warning: {w}" for w in report.warnings)
    return out


def write_projection(path: PathLike, proj: Projection, delimiter: str = ",") -> None:
    m = proj.model
    p = m.params
    param_text = ", ".join(
        f"{k} = {_fmt(v)}"
        for k, v in (("a", p.a), ("b", p.b), ("r", p.r), ("C", p.C))
        if v is not None
    )
    feat = proj.features
    feat_bits = [f"feature: {feat.kind.value}"]
    if feat.t_star is not None:
        feat_bits.append(f"t_star = {_fmt(feat.t_star)}")
    if feat.s_star is not None:
        feat_bits.append(f"s_star = {_fmt(feat.s_star)}")
    meta_lines = [
        f"# label: {proj.series.label}\n",
        f"# unit: {proj.series.unit}\n" if proj.series.unit else "",
        f"# model: {m.kind.value} ({param_text}), t_ref = {_fmt(m.t_ref)}\n",
        f"# anchor: t0 = {_fmt(proj.anchor[0])}, s0 = {_fmt(proj.anchor[1])}\n",
        "# " + ", ".join(feat_bits) + ("" if not feat.note else f" ({feat.note})") + "\n",
    ]
    meta_lines.extend(f"# warning: {w}\n" for w in proj.warnings)
    lines = meta_lines + [f"t{delimiter}value\n"]
    for t, v in zip(proj.series.times, proj.series.values):
        lines.append(f"{_fmt(t)}{delimiter}{_fmt(v)}\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def write_scenario_table(path: PathLike, report: ScenarioReport, delimiter: str = ",") -> None:
    """Scenario-by-year table with feature columns, plot-ready."""
    header = ["scenario"] + [_fmt(y) for y in report.report_years]
    header += ["feature", "feature_t", "feature_s"]
    lines = [
        _meta_block(
            {
                "unit": report.unit,
                "indistinguishable_threshold": _fmt(report.threshold),
            }
        ),
        delimiter.join(header) + "\n",
    ]
    for row in report.rows:
        cells = [row.label]
        cells += ["" if v is None else _fmt(v) for v in row.values]
        cells.append(row.features.kind.value)
        cells.append("" if row.features.t_star is None else _fmt(row.features.t_star))
        cells.append("" if row.features.s_star is None else _fmt(row.features.s_star))
        lines.append(delimiter.join(cells) + "\n")
    flag_cells = ["indistinguishable"]
    flag_cells += [
        "" if f is None else ("yes" if f else "no") for f in report.indistinguishable
    ]
    flag_cells += ["", "", ""]
    lines.append(delimiter.join(flag_cells) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def write_sidecar(path: PathLike, command: str, args: Iterable[tuple[str, str]]) -> None:
    """Deterministic run-metadata sidecar (<output>.meta)."""
    from . import __version__

    lines = [f"command: {command}\n", f"version: {__version__}\n"]
    lines.extend(f"{k}: {v}\n" for k, v in args)
    Path(str(path) + ".meta").write_text("".join(lines), encoding="utf-8")
