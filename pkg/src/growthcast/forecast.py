"""Turning rates or fitted models into trajectories.

Three routes to a trajectory:

* discrete: step the multiplicative inverse of the finite-difference
  rate definition through the rate points, so data -> rates -> data is
  exact to rounding;
* analytic polynomial: S(t) = s0 * exp(P(t) - P(t0)) with P the exact
  antiderivative of a fitted polynomial rate law, valid only inside the
  fitted range (polynomial shapes outside their data range are
  meaningless, so leaving it is refused, not warned about);
* closed form: normalize a catalog model at an anchor and evaluate it
  over a grid, attaching its critical feature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CollapseError,
    ConfigError,
    DomainError,
    NumericError,
    RangeRefusalError,
    ValidationError,
)
from .fitting import PolyFit
from .models import (
    FeatureKind,
    Features,
    Model,
    features as model_features,
    normalize,
    trajectory_at,
)
from .models import SINGULARITY_GUARD_YEARS
from .rates import RateSeries
from .timeseries import TimeSeries

Anchor = tuple[float, float]

#: Scenarios closer than this (relative to the smaller value) at a
#: report year are flagged indistinguishable.
INDISTINGUISHABLE_DEFAULT = 0.05

_ANCHOR_ALIGN_YEARS = 1e-9


@dataclass(frozen=True)
class Projection:
    """A projected trajectory with its model, feature, and anchor."""

    series: TimeSeries
    model: Model
    features: Features
    anchor: Anchor
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScenarioRow:
    label: str
    values: tuple[Optional[float], ...]
    features: Features
    anchor: Anchor


@dataclass(frozen=True)
class ScenarioReport:
    """Side-by-side values of several projections at named report years.

    ``indistinguishable`` has one entry per report year; None when fewer
    than two scenarios produced a value there.
    """

    report_years: tuple[float, ...]
    rows: tuple[ScenarioRow, ...]
    indistinguishable: tuple[Optional[bool], ...]
    threshold: float
    unit: str = ""


def integrate_discrete(rs: RateSeries, anchor: Anchor) -> TimeSeries:
    """Reconstruct a size trajectory from discrete rates.

    The step rule is the exact algebraic inverse of the finite-difference
    rate: forward S[i+1] = S[i] * (1 + R[i+1] dt), backward by division.
    The anchor time must either coincide with a rate time or precede the
    first one (supplying the leading reference point); an anchor strictly
    between rate times has no well-defined step to bridge.
    """
    t0, s0 = anchor
    if s0 <= 0:
        raise DomainError(f"anchor size must be positive, got {s0}")

    times = rs.times
    matches = np.nonzero(np.abs(times - t0) <= _ANCHOR_ALIGN_YEARS)[0]
    if matches.size:
        grid = times.copy()
        anchor_idx = int(matches[0])
        # rate i bridges (grid[i-1], grid[i]); rate 0 has no left neighbor
        rate_for_step = rs.rates
    elif t0 < times[0] - _ANCHOR_ALIGN_YEARS:
        grid = np.concatenate(([t0], times))
        anchor_idx = 0
        rate_for_step = np.concatenate(([np.nan], rs.rates))  # rate i bridges into grid[i]
    else:
        raise ValidationError(
            f"anchor time {t0} neither matches a rate time nor precedes the first "
            f"rate time {times[0]}"
        )

    values = np.empty_like(grid)
    values[anchor_idx] = s0
    for i in range(anchor_idx + 1, grid.size):
        dt = grid[i] - grid[i - 1]
        factor = 1.0 + rate_for_step[i] * dt
        if factor <= 0:
            raise CollapseError(
                f"step into t = {grid[i]} would drive the size non-positive "
                f"(1 + R*dt = {factor})"
            )
        values[i] = values[i - 1] * factor
    for i in range(anchor_idx - 1, -1, -1):
        dt = grid[i + 1] - grid[i]
        factor = 1.0 + rate_for_step[i + 1] * dt
        if factor <= 0:
            raise CollapseError(
                f"backward step into t = {grid[i]} would drive the size non-positive "
                f"(1 + R*dt = {factor})"
            )
        values[i] = values[i + 1] / factor

    return TimeSeries(times=grid, values=values, label=rs.source_label, unit="")


def integrate_rate_function(
    p: PolyFit, anchor: Anchor, grid: Sequence[float]
) -> TimeSeries:
    """Trajectory of a polynomial rate law via its exact antiderivative.

    ln S(t) = ln s0 + P(t) - P(t0); evaluation refuses any point outside
    the polynomial's fitted range.
    """
    t0, s0 = anchor
    if s0 <= 0:
        raise DomainError(f"anchor size must be positive, got {s0}")
    g = np.asarray(grid, dtype=float)
    for t in np.concatenate(([t0], g)):
        if t < p.t_min or t > p.t_max:
            raise RangeRefusalError(
                f"t = {t} lies outside the fitted range [{p.t_min}, {p.t_max}]; "
                "polynomial rate laws are not extrapolated"
            )
    log_values = math.log(s0) + p.antiderivative_at(g) - p.antiderivative_at(t0)
    return TimeSeries(times=g, values=np.exp(log_values), label="rate-law integral")


def project(
    m: Model,
    anchor: Anchor,
    grid: Sequence[float],
    label: str = "",
) -> Projection:
    """Normalize a model at the anchor and evaluate it over the grid.

    A grid crossing a finite-time singularity is truncated to the points
    strictly before it, with a warning naming the singular time.
    """
    t0, s0 = anchor
    normalized = normalize(m, t0, s0)
    return _project_evaluated(normalized, anchor, grid, label)


def project_normalized(m: Model, grid: Sequence[float], label: str = "") -> Projection:
    """Project an already-normalized model; the anchor is implicit in C."""
    if not m.is_normalized:
        raise DomainError(f"{m.kind.value} model is not normalized (C unset)")
    g = np.asarray(grid, dtype=float)
    t0 = float(g[0])
    s0 = float(trajectory_at(m, t0))
    return _project_evaluated(m, (t0, s0), grid, label)


def _project_evaluated(
    m: Model, anchor: Anchor, grid: Sequence[float], label: str
) -> Projection:
    g = np.asarray(grid, dtype=float)
    feat = model_features(m)
    notes: list[str] = []
    if feat.kind is FeatureKind.SINGULARITY:
        cutoff = feat.t_star - SINGULARITY_GUARD_YEARS
        keep = g < cutoff
        if not np.all(keep):
            notes.append(
                f"grid truncated at the singularity t = {feat.t_star}: "
                f"{int((~keep).sum())} point(s) dropped"
            )
            g = g[keep]
    if g.size < 2:
        raise DomainError(
            "fewer than 2 grid points remain before the singularity; nothing to project"
        )
    values = trajectory_at(m, g)
    series = TimeSeries(
        times=g, values=values, label=label or m.kind.value, unit=m.unit
    )
    return Projection(
        series=series, model=m, features=feat, anchor=anchor, warnings=tuple(notes)
    )


def compare_scenarios(
    projections: Sequence[Projection],
    report_years: Sequence[float],
    threshold: float = INDISTINGUISHABLE_DEFAULT,
) -> ScenarioReport:
    """Tabulate projections at report years and flag near-agreement.

    Years where all scenarios lie within ``threshold`` of each other
    (relative to the smallest value) are marked indistinguishable: up to
    that horizon the data cannot tell the scenarios apart. Values at
    report years come from the models directly, not from grid
    interpolation; a year past a scenario's singularity yields None.
    """
    if not projections:
        raise ConfigError("compare_scenarios needs at least one projection")
    units = {p.series.unit for p in projections}
    if len(units) > 1:
        raise ConfigError(f"projections mix units: {sorted(units)}")

    years = tuple(float(y) for y in report_years)
    rows = []
    for p in projections:
        vals: list[Optional[float]] = []
        for y in years:
            try:
                vals.append(float(trajectory_at(p.model, y)))
            except NumericError:
                vals.append(None)
        rows.append(
            ScenarioRow(
                label=p.series.label, values=tuple(vals), features=p.features, anchor=p.anchor
            )
        )

    flags: list[Optional[bool]] = []
    for j in range(len(years)):
        present = [row.values[j] for row in rows if row.values[j] is not None]
        if len(present) < 2 or min(present) <= 0:
            flags.append(None)
            continue
        spread = (max(present) - min(present)) / min(present)
        flags.append(spread < threshold)

    return ScenarioReport(
        report_years=years,
        rows=tuple(rows),
        indistinguishable=tuple(flags),
        threshold=threshold,
        unit=units.pop(),
    )
