"""Empirical growth rates of a series.

The growth rate of a quantity S(t) is R = (1/S) dS/dt. Two estimators
are provided:

* direct: the finite-difference form R = (S[i+1] - S[i]) / (S[i] * dt),
  attributed to the right endpoint t[i+1] with size S[i+1]. This pairing
  is exactly invertible (see ``forecast.integrate_discrete``) and is
  exact for hyperbolic data.
* refined: dS/dt estimated as the derivative of a local least-squares
  polynomial over a centered window, divided by the raw value at the
  point. This filters the noise that local gradients inject into the
  direct estimate and reveals the underlying trend.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DomainError, ValidationError
from .timeseries import TimeSeries, TransformKind, transform_series


class RateMethod(Enum):
    DIRECT = "direct"
    REFINED = "refined"


@dataclass(frozen=True)
class SmoothingConfig:
    """Window/degree of the local polynomial used for refined gradients.

    window counts points (odd, >= 3); degree must be below the window so
    the local fit is overdetermined at interior points.
    """

    window: int = 7
    degree: int = 3

    def __post_init__(self) -> None:
        if self.window < 3 or self.window % 2 == 0:
            raise ValidationError(f"window must be an odd integer >= 3, got {self.window}")
        if not (1 <= self.degree < self.window):
            raise ValidationError(
                f"degree must satisfy 1 <= degree < window, got degree={self.degree} "
                f"window={self.window}"
            )


@dataclass(frozen=True)
class RateSeries:
    """Ordered (time, rate, size) growth-rate points.

    ``sizes`` holds the series value at each time (the transformed value
    F(S) when the rates were computed on a transformed series), which
    size-dependent fits regress against.
    """

    times: np.ndarray
    rates: np.ndarray
    sizes: np.ndarray
    source_label: str = ""
    method: RateMethod = RateMethod.DIRECT

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        rates = np.asarray(self.rates, dtype=float)
        sizes = np.asarray(self.sizes, dtype=float)
        if not (times.shape == rates.shape == sizes.shape) or times.ndim != 1:
            raise ValidationError("times, rates and sizes must be 1-d arrays of equal length")
        if times.size == 0:
            raise ValidationError("a rate series needs at least one point")
        if np.any(np.diff(times) <= 0):
            raise ValidationError("rate times must be strictly increasing")
        if not np.all(np.isfinite(rates)):
            raise ValidationError("rates contain non-finite entries")
        for arr in (times, rates, sizes):
            arr.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "sizes", sizes)

    def __len__(self) -> int:
        return int(self.times.size)


def direct_rates(ts: TimeSeries) -> RateSeries:
    """Finite-difference growth rates of a series.

    For each consecutive pair, R = (S[i+1] - S[i]) / (S[i] * (t[i+1]-t[i])),
    attributed to time t[i+1] with size S[i+1]; n points in, n-1 rates out.
    """
    if np.any(ts.values == 0):
        bad = int(np.argmax(ts.values == 0))
        raise DomainError(f"direct rates undefined: series value 0 at t={ts.times[bad]}")
    dt = np.diff(ts.times)
    rates = np.diff(ts.values) / (ts.values[:-1] * dt)
    return RateSeries(
        times=ts.times[1:],
        rates=rates,
        sizes=ts.values[1:],
        source_label=ts.label,
        method=RateMethod.DIRECT,
    )


def _local_poly_gradients(times: np.ndarray, values: np.ndarray, cfg: SmoothingConfig) -> np.ndarray:
    """Derivative of a windowed least-squares polynomial at every point.

    The window is centered where possible and slides one-sidedly at the
    boundaries (it keeps its full length, anchored at the series edge),
    so the output spans the whole data range. Handles non-uniform
    spacing; the fit abscissa is shifted to the evaluation point and
    scaled to unit range for conditioning.
    """
    n = times.size
    w = cfg.window
    half = w // 2
    grads = np.empty(n)
    for i in range(n):
        lo = min(max(i - half, 0), n - w)
        idx = slice(lo, lo + w)
        x = times[idx] - times[i]
        scale = np.max(np.abs(x))
        xs = x / scale
        # Vandermonde least squares in the scaled variable
        V = np.vander(xs, cfg.degree + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(V, values[idx], rcond=None)
        grads[i] = coef[1] / scale
    return grads


def refined_rates(ts: TimeSeries, cfg: SmoothingConfig | None = None) -> RateSeries:
    """Growth rates from polynomial-smoothed gradients.

    R at each point is the local-polynomial derivative of S divided by
    the raw series value there; one rate per input point.
    """
    if cfg is None:
        cfg = SmoothingConfig()
    if len(ts) < cfg.window:
        raise ValidationError(
            f"refined rates need at least window={cfg.window} points, series has {len(ts)}"
        )
    if np.any(ts.values == 0):
        bad = int(np.argmax(ts.values == 0))
        raise DomainError(f"refined rates undefined: series value 0 at t={ts.times[bad]}")
    grads = _local_poly_gradients(ts.times, ts.values, cfg)
    return RateSeries(
        times=ts.times,
        rates=grads / ts.values,
        sizes=ts.values,
        source_label=ts.label,
        method=RateMethod.REFINED,
    )


def rate_of_transform(
    ts: TimeSeries,
    kind: TransformKind,
    method: RateMethod = RateMethod.DIRECT,
    cfg: Optional[SmoothingConfig] = None,
) -> RateSeries:
    """Growth rates of a transformed series F(S).

    Equivalent to computing rates on ``transform_series(ts, kind)``; the
    size field of the result carries F(S), not S, so size-dependent fits
    on the transformed quantity work unchanged.
    """
    transformed = transform_series(ts, kind)
    if method is RateMethod.DIRECT:
        rs = direct_rates(transformed)
    else:
        rs = refined_rates(transformed, cfg)
    label = f"{ts.label} [{kind.value}]" if ts.label else f"[{kind.value}]"
    return RateSeries(
        times=rs.times,
        rates=rs.rates,
        sizes=rs.sizes,
        source_label=label,
        method=rs.method,
    )
