"""Discrete mean-oscillation seminorms on masked grids.

Functions are cell-midpoint samples on a rectangular grid with a boolean
domain mask. A ball is the set of masked-in cells whose centres lie strictly
inside a disc; the seminorm is the largest mean oscillation found over a
family of such balls, so it is a lower bound for the continuum value.
"""

from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DegenerateInputError, DomainError

# gathered elements per vectorised chunk
_CHUNK_ELEMENTS = 4_000_000


@dataclass
class GridFunction:
    """Cell samples ``values[j, i]`` at ``(x0 + (i+0.5) s, y0 + (j+0.5) s)``."""

    values: np.ndarray
    mask: np.ndarray
    spacing: float
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.values.ndim != 2 or self.values.shape != self.mask.shape:
            raise DomainError("values and mask must be 2D arrays of equal shape")
        if not self.spacing > 0:
            raise DomainError("spacing must be positive")
        if not self.mask.any():
            raise DomainError("mask selects no cells")
        if not np.all(np.isfinite(self.values[self.mask])):
            raise DomainError("values must be finite on masked-in cells")

    @property
    def ny(self):
        return self.values.shape[0]

    @property
    def nx(self):
        return self.values.shape[1]

    @property
    def cell_area(self):
        return self.spacing ** 2

    def centers(self):
        x = self.origin[0] + (np.arange(self.nx) + 0.5) * self.spacing
        y = self.origin[1] + (np.arange(self.ny) + 0.5) * self.spacing
        return np.meshgrid(x, y)

    def with_values(self, values):
        return GridFunction(values, self.mask, self.spacing, self.origin)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __add__(self, c):
        return self.with_values(self.values + c)

    def diameter(self):
        jj, ii = np.nonzero(self.mask)
        span = np.hypot(ii.max() - ii.min() + 1, jj.max() - jj.min() + 1)
        return float(span * self.spacing)


def rasterize_disk(func: Callable, n: int, radius=1.0):
    """Sample ``func(x, y)`` on an ``n x n`` grid over ``[-r, r]**2`` masked to the disc."""
    if n < 4:
        raise DomainError("resolution must be at least 4")
    spacing = 2.0 * radius / n
    origin = (-radius, -radius)
    c = -radius + (np.arange(n) + 0.5) * spacing
    x, y = np.meshgrid(c, c)
    mask = x ** 2 + y ** 2 < radius ** 2
    values = np.zeros_like(x)
    values[mask] = func(x[mask], y[mask])
    return GridFunction(values, mask, spacing, origin)


def _bump(x, y, scale=1.0):
    r2 = (scale * x) ** 2 + (scale * y) ** 2
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


CATALOG = {
    "constant": lambda x, y: np.ones_like(x),
    "linear": lambda x, y: x,
    "bump": _bump,
    "log": lambda x, y: np.log(np.hypot(x, y)),
    "inv_sqrt": lambda x, y: np.hypot(x, y) ** -0.5,
    "power_0.3": lambda x, y: np.hypot(x, y) ** 0.3,
    "oscillatory": lambda x, y: np.sin(4 * np.pi * x) * np.cos(3 * np.pi * y),
}

# catalog members that lie in BMO and are non-constant
BMO_MEMBERS = ("linear", "bump", "log", "power_0.3", "oscillatory")


def catalog_function(name: str, n: int, scale: float = 1.0):
    if name not in CATALOG:
        raise DomainError(f"unknown catalog function {name!r}; choose from {sorted(CATALOG)}")
    func = CATALOG[name]
    if name == "bump":
        return rasterize_disk(lambda x, y: _bump(x, y, scale), n)
    return rasterize_disk(func, n)


@dataclass(frozen=True)
class Ball:
    center: Tuple[float, float]
    radius: float


class DyadicBalls:
    """Radii ``2**k * min_cells * spacing`` up to the domain diameter.

    Centres are masked-in cells; for radii of ``R`` cells the centre lattice
    is thinned to every ``max(1, R // stride_divisor)``-th cell. With
    ``stride_divisor=None`` every masked-in cell is a centre at every radius.
    """

    def __init__(self, min_cells=2, stride_divisor: Optional[int] = 4,
                 max_radius: Optional[float] = None):
        if min_cells < 2:
            raise DomainError("balls must have radius at least 2 cells")
        self.min_cells = min_cells
        self.stride_divisor = stride_divisor
        self.max_radius = max_radius

    def groups(self, f: GridFunction):
        top = f.diameter() if self.max_radius is None else self.max_radius
        R = float(self.min_cells)
        jj, ii = np.nonzero(f.mask)
        while R * f.spacing <= top * (1 + 1e-12):
            stride = 1 if self.stride_divisor is None else max(1, int(R) // self.stride_divisor)
            keep = (jj % stride == 0) & (ii % stride == 0)
            yield R, jj[keep], ii[keep]
            R *= 2.0


class ExplicitBalls:
    """A given list of ``(row, col, radius_in_cells)`` balls."""

    def __init__(self, balls: Iterable[Tuple[int, int, float]]):
        self.balls = list(balls)

    def groups(self, f: GridFunction):
        if not self.balls:
            return
        arr = np.array(self.balls, dtype=float)
        if np.any(arr[:, 2] < 2.0):
            raise DomainError("balls must have radius at least 2 cells")
        for R in np.unique(arr[:, 2]):
            sel = arr[:, 2] == R
            yield float(R), arr[sel, 0].astype(int), arr[sel, 1].astype(int)


@dataclass(frozen=True)
class BmoReport:
    seminorm_mean: float
    seminorm_inf: float
    argmax_ball: Ball
    n_balls: int

    def as_dict(self):
        return {
            "seminorm_mean": self.seminorm_mean,
            "seminorm_inf": self.seminorm_inf,
            "argmax_center": list(self.argmax_ball.center),
            "argmax_radius": self.argmax_ball.radius,
            "n_balls": self.n_balls,
        }


def _offsets(R):
    r = int(np.ceil(R))
    d = np.arange(-r, r + 1)
    dj, di = np.meshgrid(d, d, indexing="ij")
    inside = dj ** 2 + di ** 2 < R ** 2
    return dj[inside], di[inside], r


def _oscillations(vals_p, mask_p, pad, R, jj, ii):
    """Mean-variant and median-variant oscillation for each centre."""
    dj, di, _ = _offsets(R)
    K = dj.size
    chunk = max(1, _CHUNK_ELEMENTS // K)
    osc_mean = np.empty(jj.size)
    osc_med = np.empty(jj.size)
    for start in range(0, jj.size, chunk):
        sl = slice(start, start + chunk)
        rows = jj[sl, None] + pad + dj[None, :]
        cols = ii[sl, None] + pad + di[None, :]
        v = vals_p[rows, cols]
        m = mask_p[rows, cols]
        cnt = m.sum(axis=1)
        mean = np.where(m, v, 0.0).sum(axis=1) / cnt
        osc_mean[sl] = np.where(m, np.abs(v - mean[:, None]), 0.0).sum(axis=1) / cnt
        srt = np.sort(np.where(m, v, np.inf), axis=1)
        med = np.take_along_axis(srt, ((cnt - 1) // 2)[:, None], axis=1)
        osc_med[sl] = np.where(m, np.abs(v - med), 0.0).sum(axis=1) / cnt
    return osc_mean, osc_med


def bmo_seminorm(f: GridFunction, ball_strategy=None):
    """Sup over the ball family of the mean oscillation, two ways.

    ``seminorm_mean`` uses the ball average; ``seminorm_inf`` uses the lower
    median, the exact minimiser of the mean absolute deviation. The maximising
    ball for ``seminorm_mean`` is reported; ties go to the lexicographically
    smallest ``(center, radius)``.
    """
    strategy = DyadicBalls() if ball_strategy is None else ball_strategy
    groups = list(strategy.groups(f))
    if not groups or all(len(g[1]) == 0 for g in groups):
        raise DegenerateInputError("empty ball family")
    pad = int(np.ceil(max(g[0] for g in groups))) + 1
    vals_p = np.pad(f.values, pad)
    mask_p = np.pad(f.mask, pad)
    # masked-out cells must not influence sorting or sums
    vals_p = np.where(mask_p, vals_p, 0.0)

    best_mean, best_inf = -np.inf, -np.inf
    best_key = None
    n_balls = 0
    for R, jj, ii in groups:
        if jj.size == 0:
            continue
        if np.any(~f.mask[jj, ii]):
            raise DomainError("ball centres must be masked-in cells")
        n_balls += jj.size
        om, oi = _oscillations(vals_p, mask_p, pad, R, jj, ii)
        best_inf = max(best_inf, float(oi.max()))
        top = float(om.max())
        if top >= best_mean:
            hits = np.nonzero(om == top)[0]
            cx = f.origin[0] + (ii[hits] + 0.5) * f.spacing
            cy = f.origin[1] + (jj[hits] + 0.5) * f.spacing
            order = np.lexsort((cy, cx))
            k = hits[order[0]]
            key = (float(f.origin[0] + (ii[k] + 0.5) * f.spacing),
                   float(f.origin[1] + (jj[k] + 0.5) * f.spacing),
                   R * f.spacing)
            if top > best_mean or key < best_key:
                best_key = key
            best_mean = top
    return BmoReport(
        seminorm_mean=best_mean,
        seminorm_inf=best_inf,
        argmax_ball=Ball((best_key[0], best_key[1]), best_key[2]),
        n_balls=n_balls,
    )


def lp_norm(f: GridFunction, p: float):
    """``(sum over masked cells |f|**p * cell_area)**(1/p)``."""
    if not p >= 1:
        raise DomainError("p must be at least 1")
    v = np.abs(f.values[f.mask])
    if np.isinf(p):
        return float(v.max())
    scale = v.max()
    if scale == 0:
        return 0.0
    return float(scale * (np.sum((v / scale) ** p) * f.cell_area) ** (1.0 / p))


def _require_nonconstant(f, report):
    if report.seminorm_mean <= 0.0:
        raise DegenerateInputError("function is constant on the sampled balls")


def interpolation_check(f: GridFunction, p: float, theta: float, ball_strategy=None,
                        report: Optional[BmoReport] = None):
    """``||f||_q / (||f||_p**(1-theta) * |f|_BMO**theta)`` with ``q = p / (1-theta)``."""
    if not 0.0 < theta < 1.0:
        raise DomainError("theta must lie in (0, 1)")
    if not p >= 1:
        raise DomainError("p must be at least 1")
    report = bmo_seminorm(f, ball_strategy) if report is None else report
    _require_nonconstant(f, report)
    q = p / (1.0 - theta)
    return lp_norm(f, q) / (lp_norm(f, p) ** (1.0 - theta) * report.seminorm_mean ** theta)


def gradient_energy(f: GridFunction):
    """``sum |grad f|**2 * cell_area`` by central differences.

    Only cells whose four neighbours are masked in contribute.
    """
    m = f.mask
    interior = np.zeros_like(m)
    interior[1:-1, 1:-1] = m[1:-1, 1:-1] & m[2:, 1:-1] & m[:-2, 1:-1] & m[1:-1, 2:] & m[1:-1, :-2]
    v = f.values
    gx = np.zeros_like(v)
    gy = np.zeros_like(v)
    gx[1:-1, 1:-1] = (v[1:-1, 2:] - v[1:-1, :-2]) / (2 * f.spacing)
    gy[1:-1, 1:-1] = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2 * f.spacing)
    return float(np.sum((gx ** 2 + gy ** 2)[interior]) * f.cell_area)


def h1_embedding_check(f: GridFunction, ball_strategy=None,
                       report: Optional[BmoReport] = None):
    """``|f|_BMO / ||f||_H1`` with the discrete ``H1`` norm."""
    report = bmo_seminorm(f, ball_strategy) if report is None else report
    _require_nonconstant(f, report)
    h1 = np.sqrt(lp_norm(f, 2) ** 2 + gradient_energy(f))
    return report.seminorm_mean / h1
