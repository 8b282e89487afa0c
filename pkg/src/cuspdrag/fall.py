"""Quasi-static fall of the rough solid: ``n(h) dh/dt = -G``.

The remainder of the energy balance is dropped, so along an exact
trajectory ``N(h(t)) + G t = 0``. Contact in finite time happens iff the
drag is integrable at ``h = 0``.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np

from .drag import DragTable, build_drag_table
from .exceptions import DomainError, StepUnderflowError
from .geometry import RoughProfile
from .powerlaw import default_sweep

DEFAULT_REL_TOL = 1e-8
CONTACT_FRACTION = 1e-9
HORIZON_SCALES = 10.0
MAX_STEP_FRACTION = 0.25

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


@dataclass(frozen=True)
class PowerLawDrag:
    """``n(h) = K h**-beta`` with closed-form potential."""

    K: float
    beta: float

    def __post_init__(self):
        if not self.K > 0 or not self.beta >= 0:
            raise DomainError("need K > 0 and beta >= 0")

    def __call__(self, h):
        return self.K * h ** -self.beta

    def potential(self, h, h0):
        if abs(self.beta - 1.0) < 1e-14:
            return self.K * math.log(h / h0)
        e = 1.0 - self.beta
        return self.K / e * (h ** e - h0 ** e)

    def local_exponent(self, h):
        return self.beta


class TableDrag:
    """Adapter giving a fitted :class:`DragTable` the drag-source interface."""

    def __init__(self, table: DragTable):
        self.table = table

    def __call__(self, h):
        return float(self.table.predict(np.array([h]))[0])

    def potential(self, h, h0):
        return self.table.potential(h, h0)

    def local_exponent(self, h):
        if h <= self.table.h_[0]:
            return self.table.tail_exponent_
        eps = 1e-3
        return -math.log(self(h * (1 + eps)) / self(h)) / math.log1p(eps)


@lru_cache(maxsize=32)
def computed_drag(profile: RoughProfile, mu=1.0, window=None, samples=25):
    """Drag table of the test-field functional over a log sweep (cached)."""
    hs = default_sweep() if window is None else default_sweep(window, samples)
    table, _ = build_drag_table(profile, hs, mu)
    return TableDrag(table)


def contact_time_closed_form(K, beta, h0, G):
    """Time for ``K h**-beta dh/dt = -G`` to reach ``h = 0``; ``inf`` if ``beta >= 1``."""
    if not (K > 0 and h0 > 0 and G > 0 and beta >= 0):
        raise DomainError("need K, h0, G > 0 and beta >= 0")
    if beta >= 1.0:
        return math.inf
    return K * h0 ** (1.0 - beta) / ((1.0 - beta) * G)


def fall_time_scale(drag, h0, G):
    """``n(h0) h0 / G``: time to fall ``h0`` at the initial drag."""
    return drag(h0) * h0 / G


@dataclass
class FallParams:
    profile: Optional[RoughProfile]
    h0: float
    G: float = 1.0
    mu: float = 1.0
    drag_source: Union[str, PowerLawDrag, TableDrag] = "computed"
    h_contact: Optional[float] = None
    t_max: Optional[float] = None

    def __post_init__(self):
        if not self.h0 > 0:
            raise DomainError("h0 must be positive")
        if not self.G > 0:
            raise DomainError("G must be positive (solid heavier than fluid)")
        if not self.mu > 0:
            raise DomainError("mu must be positive")
        if self.h_contact is None:
            self.h_contact = CONTACT_FRACTION * self.h0
        if not 0 < self.h_contact < self.h0:
            raise DomainError("need 0 < h_contact < h0")
        if self.drag_source == "computed" and self.profile is None:
            raise DomainError("computed drag needs a profile")
        if self.t_max is not None and not self.t_max > 0:
            raise DomainError("t_max must be positive")

    def drag(self):
        if self.drag_source == "computed":
            return computed_drag(self.profile, self.mu)
        if isinstance(self.drag_source, str):
            raise DomainError(f"unknown drag source {self.drag_source!r}")
        return self.drag_source

    def horizon(self, drag=None):
        if self.t_max is not None:
            return self.t_max
        drag = self.drag() if drag is None else drag
        return HORIZON_SCALES * fall_time_scale(drag, self.h0, self.G)


class Outcome(enum.Enum):
    COLLISION = "Collision"
    NO_COLLISION = "NoCollisionWithinHorizon"


@dataclass
class FallTrajectory:
    samples: List[Tuple[float, float, float]]
    classified: Outcome
    contact_time: Optional[float] = None
    threshold_time: Optional[float] = None
    error_estimate: float = 0.0
    t_max: float = math.inf
    n_steps: int = 0
    rejected: int = 0

    @property
    def t(self):
        return np.array([s[0] for s in self.samples])

    @property
    def h(self):
        return np.array([s[1] for s in self.samples])

    @property
    def hdot(self):
        return np.array([s[2] for s in self.samples])


def _rk_step(f, h, dt, k1):
    ks = [k1]
    for i in range(1, 7):
        hi = h + dt * sum(a * k for a, k in zip(_A[i], ks))
        ks.append(f(hi))
    y5 = h + dt * sum(b * k for b, k in zip(_B5, ks))
    y4 = h + dt * sum(b * k for b, k in zip(_B4, ks))
    return y4, abs(y5 - y4), ks[-1]


def simulate_fall(params: FallParams, rel_tol=DEFAULT_REL_TOL, max_steps=1_000_000):
    """Integrate ``dh/dt = -G / n(h)`` until contact or the horizon.

    Embedded Dormand-Prince pair; the fourth-order solution is propagated and
    a step is accepted when its error estimate is at most ``rel_tol`` times
    the step's own change in ``h`` (error per unit step, so the time error
    grows like ``rel_tol * t``). Steps never change ``h`` by more than a
    quarter of its value. The threshold crossing is located by bisection on
    the last step; for a locally integrable drag the remaining fall to
    ``h = 0`` is added in closed form to give ``contact_time``. If the local
    drag exponent is at least one the crossing is only recorded as
    ``threshold_time`` and integration continues to the horizon.
    """
    if not rel_tol > 0:
        raise DomainError("rel_tol must be positive")
    drag = params.drag()
    G = params.G
    t_max = params.horizon(drag)
    h_c = params.h_contact

    def f(h):
        return -G / drag(h)

    t, h = 0.0, params.h0
    k1 = f(h)
    samples = [(t, h, k1)]
    dt = min(MAX_STEP_FRACTION * h / abs(k1), t_max)
    err_total = 0.0
    rejected = 0
    dt_floor = 1e-15 * t_max
    threshold_time = None

    for _ in range(max_steps):
        if t >= t_max:
            return FallTrajectory(samples, Outcome.NO_COLLISION, None, threshold_time,
                                  err_total, t_max, len(samples) - 1, rejected)
        dt = min(dt, t_max - t, MAX_STEP_FRACTION * h / abs(k1))
        if dt < dt_floor and t_max - t > dt_floor:
            raise StepUnderflowError(f"step {dt:g} below floor at t={t:g}, h={h:g}")
        h_new, err, k_last = _rk_step(f, h, dt, k1) if h + dt * k1 > 0 else (-1.0, math.inf, 0.0)
        change = abs(h_new - h)
        if h_new <= 0 or err > rel_tol * change:
            rejected += 1
            factor = 0.2 if not math.isfinite(err) or h_new <= 0 else max(
                0.2, 0.9 * (rel_tol * change / err) ** 0.2)
            dt *= factor
            continue

        if h_new <= h_c and threshold_time is None:
            t_c, h_hit, k_hit, e_hit = _locate(f, t, h, k1, dt, h_c, rel_tol)
            beta = drag.local_exponent(h_hit)
            if beta < 1.0:
                err_total += e_hit / abs(k1)
                samples.append((t_c, h_hit, k_hit))
                rest = drag(h_hit) * h_hit / ((1.0 - beta) * G)
                return FallTrajectory(samples, Outcome.COLLISION, t_c + rest, t_c,
                                      err_total, t_max, len(samples) - 1, rejected)
            # non-integrable drag: the remaining fall takes infinite time
            threshold_time = t_c

        t += dt
        h = h_new
        err_total += err / abs(k_last)
        k1 = f(h)
        samples.append((t, h, k1))
        grow = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (rel_tol * change / err) ** 0.2))
        dt *= grow
    raise StepUnderflowError("maximum number of steps exceeded")


def _locate(f, t, h, k1, dt, h_c, rel_tol):
    """Bisect the step size so the step lands on ``h_c``."""
    lo, hi = 0.0, dt
    best = None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        y, err, _ = _rk_step(f, h, mid, k1)
        if y > h_c:
            lo = mid
        else:
            hi = mid
            best = (mid, y, err)
        if abs(y - h_c) <= rel_tol * h_c * 1e-2 or hi - lo <= 1e-16 * max(t, 1.0):
            break
    if best is None or best[1] > h_c * (1 + rel_tol):
        y, err, _ = _rk_step(f, h, hi, k1)
        best = (hi, y, err)
    step, y, err = best
    return t + step, y, f(y), err


def energy_audit(trajectory: FallTrajectory, params: FallParams):
    """Max over samples of ``|N(h(t)) + G t|`` (zero for an exact trajectory)."""
    return float(np.max(np.abs(energy_residuals(trajectory, params))))


def energy_residuals(trajectory: FallTrajectory, params: FallParams):
    drag = params.drag()
    return np.array([drag.potential(h, params.h0) + params.G * t
                     for t, h, _ in trajectory.samples])


def potential_along(trajectory: FallTrajectory, params: FallParams):
    drag = params.drag()
    return np.array([drag.potential(h, params.h0) for _, h, _ in trajectory.samples])
