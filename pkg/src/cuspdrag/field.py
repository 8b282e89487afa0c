"""Explicit divergence-free test field in the gap and its companions.

In the gap ``{|x1| < delta, 0 <= x2 <= gamma_h(x1)}`` the field is the
perpendicular gradient of the stream function ``psi = x1 * phi`` with
``phi = P(x2 / gamma)``, ``P(s) = 3 s**2 - 2 s**3``. Writing
``phi = 3 x2**2 gamma**-2 - 2 x2**3 gamma**-3`` makes every partial
derivative a short sum of ``x2**k`` times derivatives of ``gamma**-m``,
which is how all closed forms below are produced.

Conventions: ``w = (-d2 psi, d1 psi)``; ``grad_w[i, j] = d_i w_j``.
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DomainError, NonFiniteWarning
from .geometry import _gamma_derivative
from .quadrature import graded_edges, integrate_panels

# phi as (coefficient, power of x2, power of 1/gamma)
PHI_TERMS = ((3.0, 2, 2), (-2.0, 3, 3))
# d/dh gamma = 1, so d/dh gamma**-m = -m gamma**-(m+1)
DH_PHI_TERMS = tuple((-c * m, k, m + 1) for c, k, m in PHI_TERMS)

PRESSURE_RTOL = 1e-10
_BOUNDARY_SLACK = 1e-12


def hermite_blend(s):
    """``P(s) = 3 s**2 - 2 s**3``."""
    return 3.0 * s ** 2 - 2.0 * s ** 3


def hermite_blend_prime(s):
    return 6.0 * s - 6.0 * s ** 2


class _Jet:
    """Derivatives of ``gamma`` at fixed ``x1`` and the partials they generate."""

    def __init__(self, alpha, h, x1):
        self.x1 = np.asarray(x1, dtype=float)
        ax = np.abs(self.x1)
        self.g = [h + ax ** (1.0 + alpha)]
        for order in (1, 2, 3):
            self.g.append(_gamma_derivative(alpha, self.x1, order))
        self._inv = {}

    def inv_power(self, m, i):
        """``d^i/dx1^i gamma**-m`` for ``i <= 3``."""
        key = (m, i)
        if key in self._inv:
            return self._inv[key]
        g0, g1, g2, g3 = self.g
        with np.errstate(invalid="ignore"):
            if i == 0:
                out = g0 ** -m
            elif i == 1:
                out = -m * g0 ** (-m - 1) * g1
            elif i == 2:
                out = m * (m + 1) * g0 ** (-m - 2) * g1 ** 2 - m * g0 ** (-m - 1) * g2
            elif i == 3:
                out = (-m * (m + 1) * (m + 2) * g0 ** (-m - 3) * g1 ** 3
                       + 3 * m * (m + 1) * g0 ** (-m - 2) * g1 * g2
                       - m * g0 ** (-m - 1) * g3)
            else:
                raise ValueError("only derivatives up to third order in x1")
        self._inv[key] = out
        return out

    def phi(self, terms, x2, i, j):
        """``d1^i d2^j`` of ``sum c x2**k gamma**-m``."""
        total = 0.0
        for c, k, m in terms:
            if j > k:
                continue
            falling = math.perm(k, j)
            total = total + c * falling * x2 ** (k - j) * self.inv_power(m, i)
        return total

    def psi(self, terms, x2, i, j):
        """``d1^i d2^j`` of ``x1 * phi``."""
        out = self.x1 * self.phi(terms, x2, i, j)
        if i > 0:
            out = out + i * self.phi(terms, x2, i - 1, j)
        return out


def _validate_point(profile, h, x1, x2, strict_h=True):
    if strict_h and not h > 0:
        raise DomainError(f"gap distance must be positive, got {h}")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any(np.abs(x1) > profile.delta * (1 + _BOUNDARY_SLACK)):
        raise DomainError("point outside the gap region: |x1| > delta")
    top = h + np.abs(x1) ** (1.0 + profile.alpha)
    if np.any(x2 < -_BOUNDARY_SLACK * top) or np.any(x2 > top * (1 + _BOUNDARY_SLACK)):
        raise DomainError("point outside the gap region: x2 not in [0, gamma_h(x1)]")
    return x1, x2


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _report_nonfinite(arr, what):
    if not np.all(np.isfinite(arr)):
        warnings.warn(f"{what} is not finite on the cusp line x1 = 0",
                      NonFiniteWarning, stacklevel=3)


def phi(profile, h, x1, x2):
    """Gap branch of the blending function; 0 on the wall, 1 on the solid."""
    x1, x2 = _validate_point(profile, h, x1, x2)
    s = x2 / (h + np.abs(x1) ** (1.0 + profile.alpha))
    return _out(hermite_blend(s))


def velocity(profile, h, x1, x2):
    """Test velocity ``(-x1 d2 phi, phi + x1 d1 phi)``; shape ``(..., 2)``."""
    x1, x2 = _validate_point(profile, h, x1, x2)
    jet = _Jet(profile.alpha, h, x1)
    w = np.stack([-jet.psi(PHI_TERMS, x2, 0, 1), jet.psi(PHI_TERMS, x2, 1, 0)], axis=-1)
    return w


def velocity_gradient(profile, h, x1, x2):
    """``grad_w[..., i, j] = d_i w_j`` from second derivatives of ``psi``.

    Entries involving ``gamma''`` are ``nan`` on ``x1 = 0`` when
    ``alpha < 1``; a :class:`NonFiniteWarning` is issued in that case.
    """
    x1, x2 = _validate_point(profile, h, x1, x2)
    jet = _Jet(profile.alpha, h, x1)
    grad = _gradient_from_jet(jet, x2)
    _report_nonfinite(grad, "velocity gradient")
    return grad


def _gradient_from_jet(jet, x2, terms=PHI_TERMS):
    p11 = jet.psi(terms, x2, 2, 0)
    p12 = jet.psi(terms, x2, 1, 1)
    p22 = jet.psi(terms, x2, 0, 2)
    p11, p12, p22 = np.broadcast_arrays(p11, p12, p22)
    row1 = np.stack([-p12, p11], axis=-1)
    row2 = np.stack([-p22, p12], axis=-1)
    return np.stack([row1, row2], axis=-2)


def divergence(grad):
    return grad[..., 0, 0] + grad[..., 1, 1]


def dh_velocity(profile, h, x1, x2):
    """Derivative of the velocity with respect to ``h`` at a fixed point."""
    x1, x2 = _validate_point(profile, h, x1, x2)
    jet = _Jet(profile.alpha, h, x1)
    return np.stack([-jet.psi(DH_PHI_TERMS, x2, 0, 1),
                     jet.psi(DH_PHI_TERMS, x2, 1, 0)], axis=-1)


@lru_cache(maxsize=4096)
def _pressure_integral_scalar(alpha, h, x1_abs):
    return float(pressure_integral(alpha, h, np.array([x1_abs]))[0])


def pressure_integral(alpha, h, x1_abs, rtol=PRESSURE_RTOL):
    """``12 int_0^{x} t / gamma_h(t)**3 dt`` for each entry of ``x1_abs``.

    All targets share one graded panel set (the sorted targets become panel
    edges), so a whole column of points costs a single adaptive run.
    """
    x1_abs = np.asarray(x1_abs, dtype=float)
    flat = x1_abs.ravel()
    if flat.size == 0:
        return x1_abs.copy()
    upper = float(flat.max())
    if upper == 0.0:
        return np.zeros_like(x1_abs)
    base = graded_edges(h ** (1.0 / (1.0 + alpha)), upper)
    targets = np.unique(flat[flat > 0])
    edges = np.unique(np.concatenate([base, targets]))

    def f(t):
        return 12.0 * t / (h + t ** (1.0 + alpha)) ** 3

    vals, _, _ = integrate_panels(f, edges, rtol=rtol, atol=1e-300)
    cumulative = np.concatenate([[0.0], np.cumsum(vals)])
    idx = np.searchsorted(edges, flat)
    return cumulative[idx].reshape(x1_abs.shape)


def pressure(profile, h, x1, x2, mu=1.0):
    """Companion pressure ``mu * (d21 psi + 12 int_0^{x1} t / gamma(t)**3 dt)``.

    The integral term is even in ``x1`` (odd integrand).
    """
    x1, x2 = _validate_point(profile, h, x1, x2)
    jet = _Jet(profile.alpha, h, x1)
    if np.ndim(x1) == 0:
        integral = _pressure_integral_scalar(profile.alpha, h, abs(float(x1)))
    else:
        integral = pressure_integral(profile.alpha, h, np.abs(x1))
    return _out(mu * (jet.psi(PHI_TERMS, x2, 1, 1) + integral))


def pressure_gradient(profile, h, x1, x2, mu=1.0):
    """Closed-form ``grad q``; the integral term contributes ``12 x1 / gamma**3``."""
    x1, x2 = _validate_point(profile, h, x1, x2)
    jet = _Jet(profile.alpha, h, x1)
    g1 = jet.psi(PHI_TERMS, x2, 2, 1) + 12.0 * x1 * jet.inv_power(3, 0)
    g2 = jet.psi(PHI_TERMS, x2, 1, 2)
    g1, g2 = np.broadcast_arrays(g1, g2)
    return mu * np.stack([g1, g2], axis=-1)


def stokes_residual(profile, h, x1, x2, mu=1.0):
    """``mu * Laplacian(w) - grad(pressure)`` in closed form.

    Equals ``mu * (-2 d112 psi, d111 psi)``; the second component diverges
    like ``|x1|**(alpha-1)`` toward the cusp line and is ``nan`` on it.
    """
    x1, x2 = _validate_point(profile, h, x1, x2)
    jet = _Jet(profile.alpha, h, x1)
    r = _residual_from_jet(jet, x2, mu)
    _report_nonfinite(r, "Stokes residual")
    return r


def _residual_from_jet(jet, x2, mu):
    r1 = -2.0 * jet.psi(PHI_TERMS, x2, 2, 1)
    r2 = jet.psi(PHI_TERMS, x2, 3, 0)
    r1, r2 = np.broadcast_arrays(r1, r2)
    return mu * np.stack([r1, r2], axis=-1)


@dataclass(frozen=True)
class FieldSample:
    """Everything the field module knows at one gap point."""

    x1: float
    x2: float
    h: float
    w: np.ndarray
    grad_w: np.ndarray
    dh_w: np.ndarray
    q: float
    residual: np.ndarray

    @property
    def divergence(self):
        return float(self.grad_w[0, 0] + self.grad_w[1, 1])

    @property
    def finite(self):
        return bool(np.all(np.isfinite(self.grad_w)) and np.all(np.isfinite(self.residual)))

    def as_dict(self):
        return {
            "x1": self.x1, "x2": self.x2, "h": self.h,
            "w": self.w.tolist(), "grad_w": self.grad_w.tolist(),
            "dh_w": self.dh_w.tolist(), "q": self.q,
            "residual": self.residual.tolist(), "divergence": self.divergence,
        }


def field_sample(profile, h, x1, x2, mu=1.0):
    """Evaluate every field quantity at a single point."""
    x1, x2 = float(x1), float(x2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonFiniteWarning)
        sample = FieldSample(
            x1=x1, x2=x2, h=float(h),
            w=velocity(profile, h, x1, x2),
            grad_w=velocity_gradient(profile, h, x1, x2),
            dh_w=dh_velocity(profile, h, x1, x2),
            q=pressure(profile, h, x1, x2, mu=mu),
            residual=stokes_residual(profile, h, x1, x2, mu=mu),
        )
    if not sample.finite:
        warnings.warn("field sample is not finite on the cusp line x1 = 0",
                      NonFiniteWarning, stacklevel=2)
    return sample


def random_gap_points(profile, h, n, rng, margin=1e-3):
    """Uniform random interior points: ``|x1| in (0, delta)``, ``s in (0, 1)``.

    ``margin`` keeps points away from the cusp line and the boundaries.
    """
    x1 = rng.uniform(margin, 1.0 - margin, n) * profile.delta
    x1 *= rng.choice([-1.0, 1.0], n)
    s = rng.uniform(margin, 1.0 - margin, n)
    x2 = s * (h + np.abs(x1) ** (1.0 + profile.alpha))
    return x1, x2


# five-point central stencils: offsets, first- and second-derivative weights
_OFFSETS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _relative(approx, exact):
    scale = float(np.max(np.abs(exact)))
    return float(np.max(np.abs(approx - exact)) / max(scale, 1e-300))


def finite_difference_check(profile, h, x1, x2, mu=1.0, sample=None):
    """Relative errors of the closed forms against five-point stencils.

    Returns ``{"grad", "dh", "residual"}`` or ``None`` at points where a
    stencil would leave the gap or touch the cusp line. The field and the
    pressure are polynomials of degree at most 3 in ``x2``, so the ``x2``
    stencil uses a large step and is exact; ``x1`` steps are a small
    fraction of the distance to the cusp line and the solid.
    """
    x1, x2 = float(x1), float(x2)
    a = profile.alpha
    gam = float(h + abs(x1) ** (1.0 + a))
    room = min(x2, gam - x2)
    if not (0 < abs(x1) < profile.delta and room > 0):
        return None
    sample = field_sample(profile, h, x1, x2, mu) if sample is None else sample
    slope = (1.0 + a) * abs(x1) ** a
    ex = 1e-3 * min(abs(x1), (gam - x2) / max(slope, 1e-300))
    if abs(x1) + 2.0 * ex > profile.delta:
        return None
    ey = 0.2 * room
    xs = x1 + ex * _OFFSETS
    ys = x2 + ey * _OFFSETS

    w_x = velocity(profile, h, xs, np.full(5, x2))
    w_y = velocity(profile, h, np.full(5, x1), ys)
    grad = np.stack([_D1 @ w_x / ex, _D1 @ w_y / ey])
    hs = h * (1.0 + 1e-3 * _OFFSETS)
    dh = _D1 @ np.array([velocity(profile, hh, x1, x2) for hh in hs]) / (1e-3 * h)
    lap = _D2 @ w_x / ex ** 2 + _D2 @ w_y / ey ** 2
    q_x = pressure(profile, h, xs, np.full(5, x2), mu)
    q_y = pressure(profile, h, np.full(5, x1), ys, mu)
    res = mu * lap - np.array([_D1 @ q_x / ex, _D1 @ q_y / ey])
    return {"grad": _relative(grad, sample.grad_w),
            "dh": _relative(dh, sample.dh_w),
            "residual": _relative(res, sample.residual)}
