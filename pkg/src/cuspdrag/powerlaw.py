"""Log-log least-squares power-law fits over ``h`` sweeps."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import DegenerateInputError

DEFAULT_WINDOW = (1e-7, 1e-3)
DEFAULT_SAMPLES = 25
MIN_R_SQUARED = 0.999


def default_sweep(window=DEFAULT_WINDOW, samples=DEFAULT_SAMPLES):
    """Log-spaced ``h`` values covering ``window`` (endpoints included)."""
    return np.geomspace(window[0], window[1], samples)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r_squared: float
    window: Tuple[float, float]
    n_samples: int = 0

    @property
    def trustworthy(self):
        return self.r_squared >= MIN_R_SQUARED

    def __call__(self, h):
        return self.prefactor * np.asarray(h, dtype=float) ** self.exponent


def _usable(h, values, window):
    h = np.asarray(h, dtype=float).ravel()
    values = np.asarray(values, dtype=float).ravel()
    if h.shape != values.shape:
        raise DegenerateInputError("h and values must have the same length")
    ok = np.isfinite(h) & np.isfinite(values) & (h > 0) & (values > 0)
    if window is not None:
        lo, hi = window
        ok &= (h >= lo * (1 - 1e-12)) & (h <= hi * (1 + 1e-12))
    h, values = h[ok], values[ok]
    if np.unique(h).size < 3:
        raise DegenerateInputError(
            f"need at least 3 distinct positive samples, got {np.unique(h).size}")
    return h, values


def fit_power_law(samples, window=None):
    """Fit ``value = prefactor * h**exponent`` to ``(h, value)`` pairs.

    Samples outside ``window`` or with non-positive entries are dropped;
    fewer than three distinct usable ``h`` raises
    :class:`DegenerateInputError`.
    """
    samples = list(samples)
    if not samples:
        raise DegenerateInputError("no samples")
    h, values = zip(*samples)
    return PowerLawRegressor(window=window).fit(h, values).fit_


class PowerLawRegressor(RegressorMixin, BaseEstimator):
    """Estimator wrapper: ``fit(h, values)``, ``predict(h)``, ``score``.

    ``score`` is the usual R^2, computed on the raw values; ``fit_.r_squared``
    is the R^2 of the log-log line.
    """

    def __init__(self, window=None):
        self.window = window

    def fit(self, X, y):
        h = np.asarray(X, dtype=float)
        if h.ndim == 2:
            if h.shape[1] != 1:
                raise DegenerateInputError("X must have a single column (h)")
            h = h[:, 0]
        h, values = _usable(h, y, self.window)
        lx, ly = np.log(h), np.log(values)
        slope, intercept = np.polyfit(lx, ly, 1)
        resid = ly - (slope * lx + intercept)
        ss_tot = float(np.sum((ly - ly.mean()) ** 2))
        ss_res = float(np.sum(resid ** 2))
        if ss_tot <= 1e-300:
            # exactly constant data: the line through it is perfect
            r2 = 1.0
        else:
            r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
        self.fit_ = PowerLawFit(
            exponent=float(slope),
            prefactor=float(np.exp(intercept)),
            r_squared=r2,
            window=(float(h.min()), float(h.max())),
            n_samples=int(h.size),
        )
        self.exponent_ = self.fit_.exponent
        self.prefactor_ = self.fit_.prefactor
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        h = np.asarray(X, dtype=float)
        if h.ndim == 2:
            h = h[:, 0]
        return self.fit_(h)


def local_slopes(h, values):
    """Centered log-log slopes between consecutive samples."""
    lh = np.log(np.asarray(h, dtype=float))
    lv = np.log(np.asarray(values, dtype=float))
    return np.diff(lv) / np.diff(lh)


def spread(values):
    """max/min ratio of positive values (1.0 for a constant sequence)."""
    v = np.asarray(values, dtype=float)
    return float(v.max() / v.min())

