"""Rough gap geometry and the singular model integral.

The solid's lower boundary near the tip is ``x2 = h + |x1|**(1 + alpha)``
above the flat wall ``x2 = 0``. Everything singular as ``h -> 0`` reduces to
integrals of the form ``int |x1|**p / gamma_h(x1)**q`` over ``(-delta, delta)``.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DomainError
from .quadrature import graded_edges, integrate

DEFAULT_RTOL = 1e-8


@dataclass(frozen=True)
class RoughProfile:
    """Cusp exponent ``alpha`` in (0, 1] and gap half-width ``delta`` > 0."""

    alpha: float
    delta: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not (self.delta > 0.0) or not math.isfinite(self.delta):
            raise DomainError(f"delta must be positive, got {self.delta}")

    def balance_scale(self, h):
        """Abscissa where ``h`` and ``|x1|**(1+alpha)`` are equal."""
        return h ** (1.0 / (1.0 + self.alpha))


def _check_h(h, strict=False):
    if strict and not h > 0:
        raise DomainError(f"gap distance must be positive, got {h}")
    if not h >= 0:
        raise DomainError(f"gap distance must be non-negative, got {h}")


def _check_x1(profile, x1):
    x1 = np.asarray(x1, dtype=float)
    if np.any(np.abs(x1) > 2.0 * profile.delta):
        raise DomainError("|x1| must not exceed 2*delta")
    return x1


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def gamma(profile, h, x1):
    """Gap height ``h + |x1|**(1+alpha)``; vectorised in ``x1``."""
    _check_h(h)
    x1 = _check_x1(profile, x1)
    return _out(h + np.abs(x1) ** (1.0 + profile.alpha))


def gamma_derivatives(profile, h, x1, order):
    """Derivative of ``gamma`` in ``x1`` of the given order (1, 2 or 3).

    ``h`` drops out. For ``alpha < 1`` the second and third derivatives blow
    up on ``x1 = 0``; there the result is ``nan`` (the non-finite marker),
    never an exception.
    """
    if order not in (1, 2, 3):
        raise DomainError(f"unsupported derivative order {order}")
    _check_h(h)
    x1 = _check_x1(profile, x1)
    return _out(_gamma_derivative(profile.alpha, x1, order))


def _gamma_derivative(alpha, x1, order):
    ax = np.abs(x1)
    sx = np.sign(x1)
    c = 1.0 + alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        if order == 1:
            return c * sx * ax ** alpha
        if order == 2:
            out = c * alpha * ax ** (alpha - 1.0)
        else:
            out = c * alpha * (alpha - 1.0) * sx * ax ** (alpha - 2.0)
    if alpha < 1.0:
        out = np.where(ax == 0.0, np.nan, out)
    elif order == 3:
        out = np.zeros_like(ax)
    return out


class Regime(enum.Enum):
    POWER_LAW = "PowerLaw"
    LOGARITHMIC = "Logarithmic"
    BOUNDED = "Bounded"


@dataclass(frozen=True)
class Lemma10Regime:
    """Small-``h`` behaviour class of the model integral."""

    regime: Regime
    exponent: Optional[float] = None


def lemma10_classify(p, q, profile, rel_eps=1e-12):
    """Classify ``int |x1|**p / gamma_h**q`` as ``h -> 0``.

    Power law ``h**((p+1)/(1+alpha) - q)`` when ``p + 1 < q(1+alpha)``,
    logarithmic on equality, bounded otherwise. Equality is tested with a
    relative slack of ``rel_eps`` to absorb representation error.
    """
    if not p >= 0:
        raise DomainError(f"p must be non-negative, got {p}")
    if not q > 0:
        raise DomainError(f"q must be positive, got {q}")
    lhs = p + 1.0
    rhs = q * (1.0 + profile.alpha)
    if abs(lhs - rhs) <= rel_eps * max(lhs, rhs):
        return Lemma10Regime(Regime.LOGARITHMIC)
    if lhs < rhs:
        return Lemma10Regime(Regime.POWER_LAW, lhs / (1.0 + profile.alpha) - q)
    return Lemma10Regime(Regime.BOUNDED)


def lemma10_integral(p, q, profile, h, rtol=DEFAULT_RTOL, return_error=False):
    """Evaluate ``int_{-delta}^{delta} |x1|**p / (h + |x1|**(1+alpha))**q``.

    Uses the even symmetry and graded panels split at the balance scale
    ``h**(1/(1+alpha))``. Raises :class:`QuadratureError` (carrying the
    achieved estimate) if ``rtol`` is not met.
    """
    _check_h(h, strict=True)
    a = profile.alpha

    def f(x):
        return x ** p / (h + x ** (1.0 + a)) ** q

    edges = graded_edges(profile.balance_scale(h), profile.delta)
    value, err = integrate(f, edges, rtol=rtol)
    if return_error:
        return 2.0 * float(value), 2.0 * float(err)
    return 2.0 * float(value)
