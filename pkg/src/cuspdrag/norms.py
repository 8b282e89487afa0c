"""Gap-region norms of the test field and their ``h``-scaling.

Integrals over ``{|x1| < delta, 0 < x2 < gamma_h(x1)}`` are tensor-product:
graded adaptive Gauss-Kronrod panels in ``x1`` and a 16-point Gauss rule on
each column ``[0, gamma_h(x1)]``. The integrands used here are polynomials of
degree at most 6 in ``x2``, so the column rule is exact to roundoff.
"""

from dataclasses import dataclass, asdict
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import DomainError
from .field import DH_PHI_TERMS, PHI_TERMS, _Jet, _gradient_from_jet
from .powerlaw import DEFAULT_WINDOW, default_sweep, fit_power_law
from .quadrature import GAUSS16_NODES, GAUSS16_WEIGHTS, graded_edges, integrate

DEFAULT_TOL = 1e-8
DEFAULT_H_MAX = DEFAULT_WINDOW[1]


def _column_nodes(alpha, h, x1):
    gam = h + np.abs(x1) ** (1.0 + alpha)
    x2 = 0.5 * gam[:, None] * (1.0 + GAUSS16_NODES[None, :])
    w = 0.5 * gam[:, None] * GAUSS16_WEIGHTS[None, :]
    return x2, w


def column_integral(integrand, profile, h, x1):
    """``int_0^{gamma_h(x1)} integrand(x1, x2) dx2`` for each ``x1``."""
    x1 = np.asarray(x1, dtype=float).ravel()
    x2, w = _column_nodes(profile.alpha, h, x1)
    vals = np.asarray(integrand(x1[:, None], x2), dtype=float)
    vals = np.broadcast_to(vals, x2.shape + vals.shape[2:])
    return np.einsum("ij,ij...->i...", w, vals)


def gap_integral(integrand, profile, h, tol=DEFAULT_TOL, symmetric=False,
                 x1_range=None, return_error=False):
    """Integrate a pointwise ``integrand(x1, x2)`` over the gap region.

    ``integrand`` receives broadcastable arrays and may return extra trailing
    axes (several integrands at once). With ``symmetric=True`` the integrand
    is taken to be even in ``x1`` and only ``x1 > 0`` is sampled.
    ``x1_range=(a, b)`` with ``0 <= a < b`` integrates over ``a < |x1| < b``
    instead of ``|x1| < delta``.
    """
    if not h > 0:
        raise DomainError(f"gap distance must be positive, got {h}")
    if not tol > 0:
        raise DomainError("tol must be positive")
    lo, hi = (0.0, profile.delta) if x1_range is None else x1_range
    x_star = profile.balance_scale(h)
    edges = graded_edges(x_star, hi)
    if lo > 0:
        edges = np.unique(np.concatenate([[lo], edges[edges > lo]]))

    def half(x):
        return column_integral(integrand, profile, h, x)

    value, err = integrate(half, edges, rtol=tol)
    if symmetric:
        value, err = 2.0 * value, 2.0 * err
    else:
        v2, e2 = integrate(lambda x: half(-x), edges, rtol=tol)
        value, err = value + v2, err + e2
    value = value if np.ndim(value) else float(value)
    if return_error:
        return value, err
    return value


def _grad_sq(jet, x2):
    g = _gradient_from_jet(jet, x2)
    return np.sum(g ** 2, axis=(-2, -1))


def _prop8_integrand(alpha, h):
    def f(x1, x2):
        jet = _Jet(alpha, h, x1)
        w1 = -jet.psi(PHI_TERMS, x2, 0, 1)
        w2 = jet.psi(PHI_TERMS, x2, 1, 0)
        d1 = -jet.psi(DH_PHI_TERMS, x2, 0, 1)
        d2 = jet.psi(DH_PHI_TERMS, x2, 1, 0)
        gam2 = jet.g[0] ** 2
        return np.stack(np.broadcast_arrays(
            w1 ** 2 + w2 ** 2, _grad_sq(jet, x2), gam2 * (d1 ** 2 + d2 ** 2)), axis=-1)
    return f


def grad_sq_integrand(alpha, h):
    def f(x1, x2):
        return _grad_sq(_Jet(alpha, h, x1), x2)
    return f


@lru_cache(maxsize=256)
def outer_constant(profile, h_max=DEFAULT_H_MAX, tol=DEFAULT_TOL):
    """Squared gradient norm of the field over the collar ``delta < |x1| < 2 delta``.

    The gap formulas stay regular there uniformly in ``h``; evaluated once at
    ``h_max`` it stands in for the ``h``-independent outer contribution.
    """
    return gap_integral(grad_sq_integrand(profile.alpha, h_max), profile, h_max,
                        tol=tol, symmetric=True,
                        x1_range=(profile.delta, 2.0 * profile.delta))


@dataclass(frozen=True)
class Prop8Report:
    """Gap-only norms of the test field at one ``h``."""

    h: float
    l2_w: float
    l2_grad_w: float
    weighted_sup: float
    weighted_dh: float
    outer_const: float

    @property
    def l2_grad_w_total(self):
        return float(np.sqrt(self.l2_grad_w ** 2 + self.outer_const))

    def as_dict(self):
        return asdict(self)


def weighted_column(profile, h, x1):
    """``gamma**1.5 * (int_0^gamma |grad w|**2 dx2)**0.5`` at each ``x1``."""
    x1 = np.asarray(x1, dtype=float).ravel()
    col = column_integral(grad_sq_integrand(profile.alpha, h), profile, h, x1)
    gam = h + np.abs(x1) ** (1.0 + profile.alpha)
    return gam ** 1.5 * np.sqrt(col)


def weighted_sup_profile(profile, h, n_x1=64):
    """Sampled ``(x1, weighted column norm)`` pairs, symmetric about 0.

    Positive abscissae are graded quadratically toward the cusp line, which is
    never sampled; negative ones mirror them.
    """
    if n_x1 < 16:
        raise DomainError("n_x1 must be at least 16")
    m = n_x1 // 2
    pos = profile.delta * (np.arange(1, m + 1) / m) ** 2
    x1 = np.concatenate([-pos[::-1], pos])
    vals = weighted_column(profile, h, x1)
    return list(zip(x1.tolist(), vals.tolist()))


def weighted_sup(profile, h, n_x1=64):
    """Sup over ``x1`` of the weighted column norm (sampled, then polished)."""
    pairs = weighted_sup_profile(profile, h, n_x1)
    x1 = np.array([p[0] for p in pairs])
    v = np.array([p[1] for p in pairs])
    k = int(np.argmax(v))
    best = float(v[k])
    x_best = abs(float(x1[k]))
    pos = np.sort(np.abs(x1))
    j = int(np.searchsorted(pos, x_best))
    lo = pos[j - 1] if j > 0 else 0.5 * x_best
    hi = pos[j + 1] if j + 1 < pos.size else profile.delta
    if hi > lo:
        res = minimize_scalar(lambda t: -weighted_column(profile, h, [t])[0],
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10 * profile.delta})
        best = max(best, float(-res.fun))
    return best


def prop8_suite(profile, h, tol=DEFAULT_TOL, h_max=DEFAULT_H_MAX, n_x1=64):
    """All gap functionals of the test field at ``h``."""
    if not h > 0:
        raise DomainError(f"gap distance must be positive, got {h}")
    l2w, l2g, wdh = gap_integral(_prop8_integrand(profile.alpha, h), profile, h,
                                 tol=tol, symmetric=True)
    return Prop8Report(
        h=float(h),
        l2_w=float(np.sqrt(l2w)),
        l2_grad_w=float(np.sqrt(l2g)),
        weighted_sup=weighted_sup(profile, h, n_x1),
        weighted_dh=float(np.sqrt(wdh)),
        outer_const=float(outer_constant(profile, h_max)),
    )


def prop8_sweep(profile, hs=None, tol=DEFAULT_TOL, h_max=DEFAULT_H_MAX):
    hs = default_sweep() if hs is None else hs
    return [prop8_suite(profile, float(h), tol=tol, h_max=h_max) for h in hs]


def grad_norm_exponent_target(alpha):
    """Exponent of the gap gradient norm: ``-3 alpha / (2 (1 + alpha))``."""
    return -1.5 * alpha / (1.0 + alpha)


def fit_sweep(reports, field="l2_grad_w", window=None):
    return fit_power_law([(r.h, getattr(r, field)) for r in reports], window)
