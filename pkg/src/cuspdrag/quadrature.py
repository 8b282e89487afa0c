"""Vectorised adaptive Gauss-Kronrod quadrature over graded panels.

The integrand is called once per refinement round with every active node,
so it must accept a 1D array ``x`` and return an array of shape ``(n,)`` or
``(n, m)`` (several integrands sharing the same nodes).
"""

import numpy as np

from .exceptions import QuadratureError

# Kronrod 15-point abscissae/weights with the embedded 7-point Gauss rule
# (QUADPACK qk15 constants).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes xgk[1], xgk[3], xgk[5], xgk[7].
for _k, _w in zip((1, 3, 5), _WG[:3]):
    GAUSS_WEIGHTS[_k] = _w
    GAUSS_WEIGHTS[14 - _k] = _w
GAUSS_WEIGHTS[7] = _WG[3]

# Fixed-order rule used for the x2 direction of gap integrals.
GAUSS16_NODES, GAUSS16_WEIGHTS = np.polynomial.legendre.leggauss(16)


def graded_edges(x_star, upper, n_uniform=4, per_decade=4):
    """Panel edges on ``[0, upper]``: uniform up to ``x_star``, log-spaced after.

    ``x_star`` is the abscissa where the two terms of the gap height balance;
    integrand curvature concentrates there. The node ``0`` is an edge, never a
    quadrature node.
    """
    if x_star >= upper:
        return np.linspace(0.0, upper, n_uniform + 1)
    inner = np.linspace(0.0, x_star, n_uniform + 1)
    n_log = max(1, int(np.ceil(per_decade * np.log10(upper / x_star))))
    outer = np.geomspace(x_star, upper, n_log + 1)
    return np.concatenate([inner, outer[1:]])


def _rule(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x), dtype=float)
    fx = fx.reshape((a.size, 15) + fx.shape[1:])
    kron = np.tensordot(KRONROD_WEIGHTS, fx, axes=([0], [1]))
    gauss = np.tensordot(GAUSS_WEIGHTS, fx, axes=([0], [1]))
    scale = half.reshape((-1,) + (1,) * (kron.ndim - 1))
    return kron * scale, np.abs(kron - gauss) * scale


def integrate_panels(f, edges, rtol=1e-8, atol=0.0, max_rounds=400,
                     max_intervals=200_000):
    """Integrate ``f`` over consecutive panels given by ``edges``.

    Returns ``(per_panel_values, per_panel_errors, total_error)``; for
    vector-valued ``f`` the trailing axis carries the components. Refinement
    bisects every interval whose error estimate exceeds its share of the
    global budget ``max(rtol * |total|, atol)``, per component.
    """
    edges = np.asarray(edges, dtype=float)
    n_panels = edges.size - 1
    if n_panels < 1:
        raise ValueError("need at least two edges")
    a, b = edges[:-1].copy(), edges[1:].copy()
    owner = np.arange(n_panels)
    vals, errs = _rule(f, a, b)

    done_vals = None
    done_errs = None
    done_owner = np.empty(0, dtype=int)
    for _ in range(max_rounds):
        if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(errs))):
            raise QuadratureError("integrand is not finite on the panels",
                                  estimate=np.inf, value=np.nan)
        all_vals = vals if done_vals is None else np.concatenate([done_vals, vals])
        all_errs = errs if done_errs is None else np.concatenate([done_errs, errs])
        total = np.abs(all_vals.sum(axis=0))
        total_err = all_errs.sum(axis=0)
        budget = np.maximum(rtol * total, atol)
        if np.all(total_err <= budget):
            return _collect(all_vals, all_errs, np.concatenate([done_owner, owner]),
                            n_panels, total_err)
        n_total = all_errs.shape[0]
        share = budget / n_total
        bad = errs > share
        if bad.ndim > 1:
            bad = bad.any(axis=tuple(range(1, bad.ndim)))
        if bad.size == 0:
            break
        if not bad.any():
            # budget is spread over finished intervals; refine the worst live ones
            ratio = errs / np.where(share > 0, share, 1.0)
            if ratio.ndim > 1:
                ratio = ratio.max(axis=tuple(range(1, ratio.ndim)))
            bad = ratio >= np.quantile(ratio, 0.5)
        keep = ~bad
        done_vals = vals[keep] if done_vals is None else np.concatenate([done_vals, vals[keep]])
        done_errs = errs[keep] if done_errs is None else np.concatenate([done_errs, errs[keep]])
        done_owner = np.concatenate([done_owner, owner[keep]])
        a_bad, b_bad, o_bad = a[bad], b[bad], owner[bad]
        mid = 0.5 * (a_bad + b_bad)
        a = np.concatenate([a_bad, mid])
        b = np.concatenate([mid, b_bad])
        owner = np.concatenate([o_bad, o_bad])
        if done_owner.size + a.size > max_intervals:
            break
        vals, errs = _rule(f, a, b)

    all_vals = np.concatenate([done_vals, vals]) if done_vals is not None else vals
    all_errs = np.concatenate([done_errs, errs]) if done_errs is not None else errs
    total_err = all_errs.sum(axis=0)
    raise QuadratureError(
        "quadrature tolerance not reached",
        estimate=total_err,
        value=all_vals.sum(axis=0),
    )


def _collect(vals, errs, owner, n_panels, total_err):
    shape = (n_panels,) + vals.shape[1:]
    out_v = np.zeros(shape)
    out_e = np.zeros(shape)
    np.add.at(out_v, owner, vals)
    np.add.at(out_e, owner, errs)
    return out_v, out_e, total_err


def integrate(f, edges, rtol=1e-8, atol=0.0, **kwargs):
    """Total of :func:`integrate_panels`; returns ``(value, error_estimate)``."""
    vals, _, err = integrate_panels(f, edges, rtol=rtol, atol=atol, **kwargs)
    return vals.sum(axis=0), err
