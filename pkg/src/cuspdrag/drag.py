"""Drag functional of the test field, its potential, and exponent laws."""

from dataclasses import dataclass, asdict

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import CrossCheckError, DegenerateInputError, DomainError
from .field import PHI_TERMS, _Jet, _gradient_from_jet, _residual_from_jet
from .geometry import _gamma_derivative, lemma10_integral
from .norms import (DEFAULT_H_MAX, DEFAULT_TOL, column_integral, gap_integral)
from .powerlaw import default_sweep, fit_power_law
from .quadrature import graded_edges, integrate

PAIRING_TOL = 1e-7
PAIRING_CHECK_RTOL = 1e-3


def _sym_grad_sq(jet, x2):
    g = _gradient_from_jet(jet, x2)
    d = 0.5 * (g + np.swapaxes(g, -1, -2))
    return np.sum(d ** 2, axis=(-2, -1))


def _strain_integrand(alpha, h):
    return lambda x1, x2: _sym_grad_sq(_Jet(alpha, h, x1), x2)


_collar_cache = {}


def _collar_strain(profile, h_max, tol):
    key = (profile, h_max, tol)
    if key not in _collar_cache:
        _collar_cache[key] = gap_integral(
            _strain_integrand(profile.alpha, h_max), profile, h_max, tol=tol,
            symmetric=True, x1_range=(profile.delta, 2.0 * profile.delta))
    return _collar_cache[key]


def _check(h, mu):
    if not h > 0:
        raise DomainError(f"gap distance must be positive, got {h}")
    if not mu > 0:
        raise DomainError(f"viscosity must be positive, got {mu}")


def dirichlet_energy(profile, h, mu=1.0, tol=DEFAULT_TOL, h_max=DEFAULT_H_MAX,
                     outer=True):
    """``2 mu int |D(w)|**2`` over the gap, plus the collar constant at ``h_max``."""
    _check(h, mu)
    gap = gap_integral(_strain_integrand(profile.alpha, h), profile, h, tol=tol,
                       symmetric=True)
    if outer:
        gap += _collar_strain(profile, h_max, tol)
    return 2.0 * mu * gap


def pairing_direct(profile, h, mu=1.0, tol=PAIRING_TOL):
    """``int (mu Lap w - grad q) . w`` by 2D quadrature of the closed-form residual."""
    _check(h, mu)
    a = profile.alpha

    def f(x1, x2):
        jet = _Jet(a, h, x1)
        r = _residual_from_jet(jet, x2, mu)
        w1 = -jet.psi(PHI_TERMS, x2, 0, 1)
        w2 = jet.psi(PHI_TERMS, x2, 1, 0)
        return r[..., 0] * w1 + r[..., 1] * w2

    return gap_integral(f, profile, h, tol=tol, symmetric=True)


def pairing_by_parts(profile, h, mu=1.0, tol=PAIRING_TOL, parts=False):
    """Same pairing after moving one ``x1``-derivative off ``d11 psi``.

    Volume term ``int d11psi (2 d2 w1 - d1 w2)``, plus the boundary integral
    along the solid ``x2 = gamma_h(x1)`` (where ``w = e2``) and the two lateral
    cuts ``x1 = +-delta``. The wall contributes nothing (``w = 0``).
    """
    _check(h, mu)
    a, delta = profile.alpha, profile.delta

    def vol(x1, x2):
        jet = _Jet(a, h, x1)
        p11 = jet.psi(PHI_TERMS, x2, 2, 0)
        p22 = jet.psi(PHI_TERMS, x2, 0, 2)
        return p11 * (-2.0 * p22 - p11)

    volume = gap_integral(vol, profile, h, tol=tol, symmetric=True)

    def top(x1):
        jet = _Jet(a, h, x1)
        p11 = jet.psi(PHI_TERMS, jet.g[0], 2, 0)
        return -p11 * jet.g[1]

    edges = graded_edges(profile.balance_scale(h), delta)
    top_val, _ = integrate(top, edges, rtol=tol, atol=1e-300)
    solid = 2.0 * float(top_val)

    def side(x1, x2):
        jet = _Jet(a, h, x1)
        return jet.psi(PHI_TERMS, x2, 2, 0) * jet.psi(PHI_TERMS, x2, 1, 0)

    lateral = 2.0 * float(column_integral(side, profile, h, [delta])[0])
    terms = {"volume": mu * volume, "solid": mu * solid, "lateral": mu * lateral}
    if parts:
        return terms
    return sum(terms.values())


def residual_pairing(profile, h, mu=1.0, tol=PAIRING_TOL, check=True,
                     check_rtol=PAIRING_CHECK_RTOL):
    """Residual pairing with the test field itself (integrated-by-parts value).

    With ``check=True`` the direct quadrature is also evaluated and a
    :class:`CrossCheckError` is raised if the two differ by more than
    ``check_rtol`` relative.
    """
    b = pairing_by_parts(profile, h, mu, tol)
    if check:
        a = pairing_direct(profile, h, mu, tol)
        if abs(a - b) > check_rtol * max(abs(b), 1e-300):
            raise CrossCheckError(
                f"pairing cross-check failed at h={h}: direct={a}, by parts={b}",
                first=a, second=b)
    return b


def boundary_term_bound(profile, h, tol=DEFAULT_TOL):
    """``int_0^delta |6 x1 g'**2 / g**2 * g' / (1 + g'**2)| dx1`` with ``g = gamma_h``."""
    if not h > 0:
        raise DomainError(f"gap distance must be positive, got {h}")
    a = profile.alpha

    def f(x):
        g = h + x ** (1.0 + a)
        g1 = _gamma_derivative(a, x, 1)
        return np.abs(6.0 * x * g1 ** 2 / g ** 2 * g1 / (1.0 + g1 ** 2))

    value, _ = integrate(f, graded_edges(profile.balance_scale(h), profile.delta),
                         rtol=tol, atol=1e-300)
    return float(value)


def reynolds_drag(profile, h, mu=1.0, rtol=DEFAULT_TOL):
    """Lubrication drag ``12 mu int x1**2 / gamma_h**3 dx1``."""
    _check(h, mu)
    return 12.0 * mu * lemma10_integral(2, 3, profile, h, rtol=rtol)


@dataclass(frozen=True)
class DragSample:
    h: float
    dirichlet: float
    pairing: float
    n: float
    reynolds: float

    def as_dict(self):
        return asdict(self)


def drag_coefficient(profile, h, mu=1.0, tol=DEFAULT_TOL, h_max=DEFAULT_H_MAX,
                     check=True):
    """``n(h)`` = Dirichlet term + residual pairing, with the lubrication oracle."""
    dirichlet = dirichlet_energy(profile, h, mu, tol=tol, h_max=h_max)
    pairing = residual_pairing(profile, h, mu, check=check)
    return DragSample(
        h=float(h), dirichlet=float(dirichlet), pairing=float(pairing),
        n=float(dirichlet + pairing), reynolds=float(reynolds_drag(profile, h, mu)),
    )


def drag_sweep(profile, hs=None, mu=1.0, check=True, **kwargs):
    hs = default_sweep() if hs is None else hs
    return [drag_coefficient(profile, float(h), mu, check=check, **kwargs) for h in hs]


@dataclass(frozen=True)
class RegimeVerdict:
    alpha: float
    beta: float
    collides: bool


def drag_exponent(alpha):
    """``beta = 3 alpha / (1 + alpha)``; drag grows like ``h**-beta``."""
    return 3.0 * alpha / (1.0 + alpha)


def collision_regime(alpha):
    """Contact in finite time iff ``beta < 1`` iff ``alpha < 1/2``."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    beta = drag_exponent(alpha)
    return RegimeVerdict(alpha=float(alpha), beta=beta, collides=bool(beta < 1.0))


def starovoitov_beta(alpha, p):
    """``2 - (p+1) / (p (1+alpha)) - 1/p``, the no-touchdown exponent."""
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if np.isinf(p):
        return 2.0 - 1.0 / (1.0 + alpha)
    return 2.0 - (p + 1.0) / (p * (1.0 + alpha)) - 1.0 / p


def starovoitov_threshold(alpha):
    """Smallest ``p`` with ``starovoitov_beta(alpha, p) >= 1``: ``(2+alpha)/alpha``."""
    return (2.0 + alpha) / alpha


class DragTable(RegressorMixin, BaseEstimator):
    """Log-log piecewise-linear interpolant of tabulated drag samples.

    Below the smallest tabulated ``h`` the drag is extended as a power law
    whose exponent is fitted on the ``tail`` smallest samples; above the
    largest, the last segment's slope is continued. ``potential`` integrates
    the interpolant exactly, segment by segment.
    """

    def __init__(self, tail=5):
        self.tail = tail

    def fit(self, X, y):
        h = np.asarray(X, dtype=float).ravel()
        n = np.asarray(y, dtype=float).ravel()
        if h.size != n.size or h.size < 3:
            raise DegenerateInputError("need at least 3 (h, n) samples")
        if np.any(h <= 0) or np.any(n <= 0) or not np.all(np.isfinite(n)):
            raise DegenerateInputError("drag samples must be positive and finite")
        order = np.argsort(h)
        self.h_ = h[order]
        self.n_ = n[order]
        if np.unique(self.h_).size != self.h_.size:
            raise DegenerateInputError("duplicate h in drag table")
        k = min(self.tail, self.h_.size)
        tail = fit_power_law(zip(self.h_[:k], self.n_[:k]))
        self.tail_exponent_ = -tail.exponent
        self.tail_prefactor_ = self.n_[0] * self.h_[0] ** self.tail_exponent_
        lh, ln = np.log(self.h_), np.log(self.n_)
        self.slopes_ = np.diff(ln) / np.diff(lh)
        # cumulative integral of n from h_[0] to each node
        seg = np.array([_power_segment(self.h_[i], self.n_[i], self.slopes_[i],
                                       self.h_[i + 1]) for i in range(self.h_.size - 1)])
        self.cumulative_ = np.concatenate([[0.0], np.cumsum(seg)])
        return self

    @property
    def beta_(self):
        return self.tail_exponent_

    def predict(self, X):
        check_is_fitted(self, "h_")
        h = np.asarray(X, dtype=float)
        lh = np.log(h)
        out = np.interp(lh, np.log(self.h_), np.log(self.n_))
        below = h < self.h_[0]
        out = np.where(below, np.log(self.n_[0]) - self.tail_exponent_ * (lh - np.log(self.h_[0])), out)
        above = h > self.h_[-1]
        out = np.where(above, np.log(self.n_[-1]) + self.slopes_[-1] * (lh - np.log(self.h_[-1])), out)
        return np.exp(out)

    def _integral_from_min(self, h):
        """``int_{h_[0]}^{h} n``; negative for ``h < h_[0]``."""
        h0, n0 = self.h_[0], self.n_[0]
        if h < h0:
            return -_power_segment(h, n0 * (h / h0) ** -self.tail_exponent_,
                                   -self.tail_exponent_, h0)
        if h > self.h_[-1]:
            return self.cumulative_[-1] + _power_segment(
                self.h_[-1], self.n_[-1], self.slopes_[-1], h)
        i = min(int(np.searchsorted(self.h_, h, side="right")) - 1, self.h_.size - 2)
        return self.cumulative_[i] + _power_segment(self.h_[i], self.n_[i],
                                                    self.slopes_[i], h)

    def potential(self, h, h0):
        """``N(h) = int_{h0}^{h} n(s) ds``; zero at ``h0``, negative below it."""
        check_is_fitted(self, "h_")
        return float(self._integral_from_min(h) - self._integral_from_min(h0))

    def limit_potential(self, h0):
        """``N(0+)``: finite iff the tail exponent is below one, else ``-inf``."""
        if self.tail_exponent_ >= 1.0:
            return -np.inf
        h_min, n_min = self.h_[0], self.n_[0]
        below = n_min * h_min / (1.0 - self.tail_exponent_)
        return float(-below - self._integral_from_min(h0))


def _power_segment(a, n_a, k, b):
    """``int_a^b n_a (s/a)**k ds``."""
    if abs(k + 1.0) < 1e-12:
        return n_a * a * np.log(b / a)
    return n_a * a / (k + 1.0) * ((b / a) ** (k + 1.0) - 1.0)


def build_drag_table(profile, hs=None, mu=1.0, check=False, **kwargs):
    samples = drag_sweep(profile, hs, mu, check=check, **kwargs)
    table = DragTable().fit([s.h for s in samples], [s.n for s in samples])
    return table, samples


def drag_potential(profile, h, h0, mu=1.0, table=None, samples=25):
    """``N(h) = int_{h0}^{h} n``, from a log grid of drag samples down to ``h``."""
    if not 0 < h <= h0:
        raise DomainError("need 0 < h <= h0")
    if table is None:
        hs = np.geomspace(min(h, h0 * 1e-4), h0, samples)
        table, _ = build_drag_table(profile, hs, mu)
    return table.potential(h, h0)
