import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuspdrag.exceptions import DomainError, QuadratureError
from cuspdrag.geometry import (Regime, RoughProfile, gamma, gamma_derivatives,
                               lemma10_classify, lemma10_integral)
from cuspdrag.powerlaw import fit_power_law
from cuspdrag.quadrature import graded_edges, integrate

alphas = st.floats(0.05, 1.0)


def arctan_reference(h, delta=1.0):
    return 2.0 / math.sqrt(h) * math.atan(delta / math.sqrt(h))


def test_profile_validation():
    for a in (0.0, -0.1, 1.5, float("nan")):
        with pytest.raises(DomainError):
            RoughProfile(a)
    with pytest.raises(DomainError):
        RoughProfile(0.5, delta=0.0)
    with pytest.raises(DomainError):
        RoughProfile(0.5, delta=float("inf"))


def test_gamma_values():
    assert gamma(RoughProfile(1.0), 0.1, 0.2) == pytest.approx(0.14, rel=1e-15)
    for a in (0.1, 0.5, 1.0):
        assert gamma(RoughProfile(a), 0.0, 0.0) == 0.0
    assert gamma(RoughProfile(0.5), 1e-3, 0.0) == 1e-3


def test_gamma_rejects_bad_input():
    p = RoughProfile(0.5)
    with pytest.raises(DomainError):
        gamma(p, -1e-3, 0.1)
    with pytest.raises(DomainError):
        gamma(p, 1e-3, 1.01)


def test_gamma_derivative_values():
    assert gamma_derivatives(RoughProfile(1.0), 0.3, 0.3, 1) == pytest.approx(0.6)
    assert gamma_derivatives(RoughProfile(0.5), 1e-3, 0.0, 1) == 0.0
    assert math.isnan(gamma_derivatives(RoughProfile(0.5), 1e-3, 0.0, 2))
    assert math.isnan(gamma_derivatives(RoughProfile(0.5), 1e-3, 0.0, 3))
    assert gamma_derivatives(RoughProfile(1.0), 1e-3, 0.0, 2) == 2.0
    assert gamma_derivatives(RoughProfile(1.0), 1e-3, 0.0, 3) == 0.0
    with pytest.raises(DomainError):
        gamma_derivatives(RoughProfile(1.0), 1e-3, 0.1, 4)


@settings(max_examples=50, deadline=None)
@given(alphas, st.floats(0.01, 0.9), st.sampled_from([-1.0, 1.0]), st.integers(1, 3))
def test_gamma_derivatives_match_finite_differences(alpha, x, sign, order):
    p = RoughProfile(alpha)
    x1 = sign * x * p.delta
    eps = 1e-4 * abs(x1)

    def lower(t):
        return gamma(p, 1e-3, t) if order == 1 else gamma_derivatives(p, 1e-3, t, order - 1)

    fd = (-lower(x1 + 2 * eps) + 8 * lower(x1 + eps) - 8 * lower(x1 - eps)
          + lower(x1 - 2 * eps)) / (12 * eps)
    exact = gamma_derivatives(p, 1e-3, x1, order)
    assert fd == pytest.approx(exact, rel=1e-6, abs=1e-9 * max(1.0, abs(exact)))


def test_lemma10_classification_examples():
    r = lemma10_classify(2, 3, RoughProfile(0.5))
    assert r.regime is Regime.POWER_LAW and r.exponent == pytest.approx(-1.0)
    assert lemma10_classify(1, 1, RoughProfile(1.0)).regime is Regime.LOGARITHMIC
    b = lemma10_classify(2, 1, RoughProfile(1.0))
    assert b.regime is Regime.BOUNDED and b.exponent is None


@given(st.floats(0, 6), st.floats(0.1, 4), alphas)
def test_classification_matches_inequality(p, q, alpha):
    r = lemma10_classify(p, q, RoughProfile(alpha))
    lhs, rhs = p + 1, q * (1 + alpha)
    if r.regime is Regime.POWER_LAW:
        assert lhs < rhs and r.exponent < 0
        assert r.exponent == pytest.approx(lhs / (1 + alpha) - q)
    elif r.regime is Regime.BOUNDED:
        assert lhs > rhs
    else:
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_classify_rejects_bad_exponents():
    with pytest.raises(DomainError):
        lemma10_classify(-1, 1, RoughProfile(0.5))
    with pytest.raises(DomainError):
        lemma10_classify(1, 0, RoughProfile(0.5))


# references from the arctan antiderivative, computed before the build
FROZEN = {1.0: 1.5707963267948966, 1e-2: 29.422553486074694, 1e-4: 312.1593320216463,
          1e-6: 3139.59265425646, 1e-8: 31413.926535904597}


@pytest.mark.parametrize("h", sorted(FROZEN))
def test_lemma10_arctan_oracle(h):
    p = RoughProfile(1.0, delta=1.0)
    assert arctan_reference(h) == pytest.approx(FROZEN[h], rel=1e-14)
    assert lemma10_integral(0, 1, p, h) == pytest.approx(FROZEN[h], rel=1e-8)


def test_lemma10_error_estimate_returned():
    value, err = lemma10_integral(0, 1, RoughProfile(1.0, 1.0), 1e-4, return_error=True)
    assert abs(value - FROZEN[1e-4]) <= max(err, 1e-12 * value) * 10
    assert err <= 1e-8 * value


def test_lemma10_sweep_exponents():
    hs = np.geomspace(1e-6, 1e-2, 9)
    fit = fit_power_law((h, lemma10_integral(2, 3, RoughProfile(0.5), h)) for h in hs)
    assert fit.exponent == pytest.approx(-1.0, abs=0.01)
    fit = fit_power_law((h, lemma10_integral(0, 1, RoughProfile(1.0, 1.0), h)) for h in hs)
    assert fit.exponent == pytest.approx(-0.5, abs=0.01)


def test_boundary_term_exponents_are_bounded():
    for a in (0.1, 0.5, 1.0):
        assert lemma10_classify(1 + 3 * a, 2, RoughProfile(a)).regime is Regime.BOUNDED


def test_lemma10_rejects_nonpositive_h():
    with pytest.raises(DomainError):
        lemma10_integral(0, 1, RoughProfile(1.0), 0.0)


def test_graded_edges_structure():
    e = graded_edges(1e-3, 0.5)
    assert e[0] == 0.0 and e[-1] == 0.5
    assert np.all(np.diff(e) > 0)
    assert np.any(np.isclose(e, 1e-3))


def test_integrate_polynomial_exact():
    value, err = integrate(lambda x: x ** 5 - 3 * x, np.array([0.0, 0.5, 2.0]))
    assert value == pytest.approx(64 / 6 - 6, rel=1e-14)


def test_integrate_reports_failure():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: 1.0 / np.abs(x - 0.3), np.array([0.0, 1.0]), rtol=1e-12,
                  max_rounds=5)
    assert info.value.estimate is not None


def test_integrate_rejects_nonfinite_integrand():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.full_like(x, np.nan), np.array([0.0, 1.0]))
