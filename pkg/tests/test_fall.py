import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuspdrag import fall
from cuspdrag.exceptions import DomainError
from cuspdrag.geometry import RoughProfile


def power_params(K=1.0, beta=0.5, h0=1.0, G=1.0, **kw):
    return fall.FallParams(None, h0, G, drag_source=fall.PowerLawDrag(K, beta), **kw)


def test_closed_form_values():
    assert fall.contact_time_closed_form(1, 0, 1, 2) == 0.5
    assert fall.contact_time_closed_form(1, 0.5, 1, 1) == pytest.approx(2.0)
    assert fall.contact_time_closed_form(1, 1.2, 1, 1) == math.inf
    assert fall.contact_time_closed_form(1, 1.0, 1, 1) == math.inf
    with pytest.raises(DomainError):
        fall.contact_time_closed_form(1, 0.5, 1, 0)


def test_square_root_drag_contact_time():
    traj = fall.simulate_fall(power_params(h_contact=1e-9))
    assert traj.classified is fall.Outcome.COLLISION
    assert traj.contact_time == pytest.approx(2.0, rel=1e-4)
    assert traj.threshold_time <= traj.contact_time <= traj.t_max
    assert traj.samples[-1][1] <= 1e-9


@pytest.mark.parametrize("t_max", (1.0, 10.0, 100.0))
def test_logarithmic_drag_never_touches(t_max):
    traj = fall.simulate_fall(power_params(beta=1.0, t_max=t_max))
    assert traj.classified is fall.Outcome.NO_COLLISION
    assert traj.contact_time is None
    assert np.allclose(traj.h, np.exp(-traj.t), rtol=1e-6)
    assert traj.t[-1] == pytest.approx(t_max)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.0, 0.95), st.floats(-3, 0), st.floats(0.1, 10))
def test_contact_time_oracle(K, beta, log_h0, G):
    h0 = 10 ** log_h0
    exact = fall.contact_time_closed_form(K, beta, h0, G)
    traj = fall.simulate_fall(power_params(K, beta, h0, G, t_max=2 * exact))
    assert traj.classified is fall.Outcome.COLLISION
    assert traj.contact_time == pytest.approx(exact, rel=1e-4)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.0, 1.5), st.floats(0.1, 10))
def test_trajectory_invariants_and_audit(K, beta, G):
    params = power_params(K, beta, 1.0, G)
    tol = 1e-8
    traj = fall.simulate_fall(params, tol)
    assert np.all(np.diff(traj.h) < 0) and np.all(traj.hdot < 0)
    assert np.all(np.diff(traj.t) > 0)
    res = fall.energy_residuals(traj, params)
    assert res[0] == 0.0
    n_end = abs(params.drag().potential(traj.samples[-1][1], 1.0))
    assert fall.energy_audit(traj, params) <= 10 * tol * n_end
    if traj.contact_time is not None:
        assert traj.threshold_time <= traj.t_max


def test_audit_scales_linearly_with_tolerance():
    params = power_params(beta=0.5)
    audits = [fall.energy_audit(fall.simulate_fall(params, tol), params) / tol
              for tol in (1e-8, 1e-9, 1e-10)]
    assert max(audits) / min(audits) <= 1.5


def test_halving_tolerance_within_error_estimate():
    params = power_params(beta=0.5, t_max=10.0)
    for tol in (1e-6, 1e-8):
        coarse = fall.simulate_fall(params, tol)
        fine = fall.simulate_fall(params, tol / 2)
        assert abs(fine.contact_time - coarse.contact_time) < coarse.error_estimate


@pytest.mark.parametrize("alpha,outcome", [(0.25, fall.Outcome.COLLISION),
                                           (0.75, fall.Outcome.NO_COLLISION)])
def test_computed_drag_dichotomy(alpha, outcome):
    params = fall.FallParams(RoughProfile(alpha), h0=1e-3)
    traj = fall.simulate_fall(params)
    assert traj.classified is outcome
    assert traj.t_max == pytest.approx(10 * fall.fall_time_scale(params.drag(), 1e-3, 1.0))
    res = fall.energy_residuals(traj, params)
    assert res[0] == 0.0
    # ODE error is rel_tol per unit time; the table potential is integrated exactly
    assert np.max(np.abs(res)) <= 10 * 1e-8 * max(traj.t[-1], 1.0)


def test_table_drag_adapter():
    d = fall.computed_drag(RoughProfile(0.25))
    assert d.local_exponent(1e-12) == pytest.approx(0.6, abs=0.05)
    assert d.local_exponent(1e-5) == pytest.approx(0.6, abs=0.1)
    assert d.potential(1e-3, 1e-3) == 0.0


def test_params_validation():
    p = RoughProfile(0.5)
    with pytest.raises(DomainError):
        fall.FallParams(p, h0=0.0)
    with pytest.raises(DomainError):
        fall.FallParams(p, h0=1e-3, G=-1.0)
    with pytest.raises(DomainError):
        fall.FallParams(p, h0=1e-3, h_contact=1e-2)
    with pytest.raises(DomainError):
        fall.FallParams(None, h0=1e-3)
    with pytest.raises(DomainError):
        fall.FallParams(p, h0=1e-3, t_max=0.0)
    with pytest.raises(DomainError):
        fall.PowerLawDrag(0.0, 0.5)
    with pytest.raises(DomainError):
        fall.simulate_fall(power_params(), rel_tol=0.0)
    assert fall.FallParams(p, h0=1e-3).h_contact == pytest.approx(1e-12)
