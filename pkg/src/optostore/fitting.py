"""Exponential-decay fits and half-maximum linewidths."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, ShapeError


@dataclass(frozen=True)
class FitRecord:
    model: str
    params: dict = field(default_factory=dict)
    units: dict = field(default_factory=dict)
    residual_norm: float = 0.0
    converged: bool = True

    def __getitem__(self, key):
        return self.params[key]


def fit_exponential(x, y) -> FitRecord:
    """Fit y = A exp(-x / tau).

    Log-linear least squares gives the starting point; one Gauss-Newton pass
    on the linear-scale residual refines it.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 3:
        raise FitError("exponential fit needs at least 3 paired points")
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise FitError("exponential fit needs strictly positive values")
    if np.ptp(x) == 0:
        raise FitError("exponential fit needs distinct abscissae")

    slope, intercept = np.polyfit(x, np.log(y), 1)
    rate = -slope
    amp = math.exp(intercept)
    if not rate > 1e-12 / np.ptp(x):
        res = float(np.linalg.norm(y - amp * np.exp(-rate * x)))
        return FitRecord("exponential_decay", {"A": amp, "tau": math.inf, "rate": float(rate)},
                         {"tau": "same as x", "rate": "1/x"}, res, converged=False)

    model = amp * np.exp(-rate * x)
    r = y - model
    jac = np.column_stack((model / amp, -x * model))
    step, *_ = np.linalg.lstsq(jac, r, rcond=None)
    if np.all(np.isfinite(step)) and amp + step[0] > 0 and rate + step[1] > 0:
        amp, rate = amp + step[0], rate + step[1]
    res = float(np.linalg.norm(y - amp * np.exp(-rate * x)))
    amp, rate = float(amp), float(rate)
    return FitRecord("exponential_decay", {"A": amp, "tau": 1.0 / rate, "rate": rate},
                     {"tau": "same as x", "rate": "1/x"}, res, converged=True)


def _crossing(x0, y0, x1, y1, level):
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def half_max_points(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3 or x.shape != y.shape:
        raise ShapeError("lineshape needs at least 3 paired points")
    order = np.argsort(x)
    x, y = x[order], y[order]
    i = int(np.argmax(y))
    if i == 0 or i == len(y) - 1:
        raise ShapeError("lineshape peak is not interior")
    level = 0.5 * y[i]
    j = i
    while j > 0 and y[j - 1] >= level:
        j -= 1
    if j == 0:
        raise ShapeError("no half-maximum crossing below the peak")
    left = _crossing(x[j - 1], y[j - 1], x[j], y[j], level)
    k = i
    while k < len(y) - 1 and y[k + 1] >= level:
        k += 1
    if k == len(y) - 1:
        raise ShapeError("no half-maximum crossing above the peak")
    right = _crossing(x[k], y[k], x[k + 1], y[k + 1], level)
    return left, right


def measure_fwhm(x, y) -> float:
    """Full width at half maximum by linear interpolation of the crossings."""
    left, right = half_max_points(x, y)
    return float(right - left)


def fit_fwhm(x, y) -> FitRecord:
    left, right = map(float, half_max_points(x, y))
    return FitRecord("lineshape_fwhm",
                     {"fwhm": right - left, "left": left, "right": right,
                      "center": 0.5 * (left + right)},
                     {"fwhm": "same as x"}, 0.0, True)
