import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from cuspdrag.exceptions import DegenerateInputError
from cuspdrag.powerlaw import (DEFAULT_WINDOW, PowerLawRegressor, default_sweep,
                               fit_power_law, local_slopes, spread)


def test_exact_power_law():
    hs = default_sweep()
    fit = fit_power_law((h, 5 * h ** -1.5) for h in hs)
    assert fit.exponent == pytest.approx(-1.5, abs=1e-12)
    assert fit.prefactor == pytest.approx(5.0, rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.window == pytest.approx(DEFAULT_WINDOW)
    assert fit.n_samples == 25 and fit.trustworthy


def test_constant_gives_zero_exponent():
    fit = fit_power_law((h, 3.0) for h in default_sweep())
    assert fit.exponent == pytest.approx(0.0, abs=1e-12)
    assert 0.0 <= fit.r_squared <= 1.0


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(0.01, 100), st.integers(0, 2 ** 31))
def test_noisy_fit_recovers_exponent(b, c, seed):
    rng = np.random.default_rng(seed)
    hs = default_sweep()
    vals = c * hs ** b * np.exp(1e-3 * rng.standard_normal(hs.size))
    fit = fit_power_law(zip(hs, vals))
    assert fit.exponent == pytest.approx(b, abs=5e-3)
    assert 0.0 <= fit.r_squared <= 1.0


def test_window_drops_samples():
    hs = np.geomspace(1e-8, 1.0, 17)
    vals = np.where(hs <= 1e-4 * (1 + 1e-9), hs ** -1.0, hs ** -2.0)
    fit = fit_power_law(zip(hs, vals), window=(1e-8, 1e-4))
    assert fit.exponent == pytest.approx(-1.0, abs=1e-12)
    assert fit.window[1] <= 1e-4 * (1 + 1e-12)


def test_degenerate_inputs():
    with pytest.raises(DegenerateInputError):
        fit_power_law([])
    with pytest.raises(DegenerateInputError):
        fit_power_law([(1e-3, 1.0), (1e-3, 2.0), (1e-2, 1.0)])
    with pytest.raises(DegenerateInputError):
        fit_power_law([(1e-3, -1.0), (1e-2, 0.0), (1e-1, 1.0), (1.0, 2.0)])


def test_regressor_follows_estimator_api():
    est = PowerLawRegressor(window=(1e-6, 1e-2))
    assert est.get_params() == {"window": (1e-6, 1e-2)}
    est.set_params(window=None)
    assert clone(est).get_params() == {"window": None}
    with pytest.raises(NotFittedError):
        est.predict([1e-3])
    hs = default_sweep()
    est.fit(hs.reshape(-1, 1), 2 * hs ** 0.5)
    assert est.exponent_ == pytest.approx(0.5)
    assert est.predict([[1e-4]])[0] == pytest.approx(2e-2)
    assert est.score(hs.reshape(-1, 1), 2 * hs ** 0.5) == pytest.approx(1.0)


def test_regressor_rejects_two_columns():
    with pytest.raises(DegenerateInputError):
        PowerLawRegressor().fit(np.ones((5, 2)), np.ones(5))


def test_local_slopes_and_spread():
    hs = np.geomspace(1e-4, 1, 5)
    assert np.allclose(local_slopes(hs, hs ** -0.7), -0.7)
    assert spread([2.0, 4.0, 3.0]) == 2.0
    assert spread([1.0, 1.0]) == 1.0
