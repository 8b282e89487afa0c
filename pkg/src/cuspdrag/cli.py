"""Command-line front end: sweeps, probes, fall simulations, BMO checks.

Every command resolves an effective configuration (built-in defaults, then
``--config`` file, then explicit flags), validates it before computing, and
embeds it as the first line of its CSV/JSON output so a run can be replayed
with ``--config <output file>``.

Exit codes: 0 success, 1 numerical failure, 2 usage or validation error.
"""

import argparse
import configparser
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bmo, drag, fall, field, geometry, norms
from .exceptions import (CrossCheckError, DegenerateInputError, DomainError,
                         NonFiniteWarning, QuadratureError, StepUnderflowError)
from .powerlaw import MIN_R_SQUARED, fit_power_law

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

COMMON_DEFAULTS = {
    "alpha": [1.0],
    "delta": 0.5,
    "h_min": 1e-7,
    "h_max": 1e-3,
    "samples": 25,
    "tol": 1e-8,
    "mu": 1.0,
    "seed": 0,
    "jobs": None,
    "out": "-",
    "plot_script": None,
}

COMMAND_DEFAULTS = {
    "field-probe": {"h": [1e-3], "where": "random", "n_points": 100, "points": None,
                    "fd_tol": 1e-4},
    "sweep-norms": {"r2_floor": MIN_R_SQUARED},
    "drag-table": {"r2_floor": MIN_R_SQUARED, "check": True},
    "sweep": {"r2_floor": MIN_R_SQUARED, "check": True},
    "fall": {"h0": 1e-3, "G": 1.0, "drag": "computed", "K": 1.0, "beta": 0.5,
             "h_contact": None, "t_max": None, "summary": None},
    "bmo-check": {"functions": list(bmo.CATALOG), "resolutions": [128, 256],
                  "p": 2.0, "theta": 0.5},
    "lemma10": {"p": 2.0, "q": 3.0},
}

NORM_COLUMNS = ["alpha", "h", "l2_w", "l2_grad_w", "weighted_sup", "weighted_dh"]
DRAG_COLUMNS = ["alpha", "h", "dirichlet", "pairing", "n", "reynolds", "N"]
TRAJ_COLUMNS = ["t", "h", "hdot", "N_of_h", "R_model"]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing

def _floats(text):
    return [float(v) for v in str(text).replace(",", " ").split()]


def _ints(text):
    return [int(v) for v in str(text).replace(",", " ").split()]


def _strs(text):
    return [v for v in str(text).replace(",", " ").split()]


def build_parser():
    parser = argparse.ArgumentParser(prog="cuspdrag", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def common(p):
        p.add_argument("--alpha", type=_floats, default=S, help="cusp exponent(s), comma list")
        p.add_argument("--delta", type=float, default=S, help="gap half-width")
        p.add_argument("--h-min", dest="h_min", type=float, default=S)
        p.add_argument("--h-max", dest="h_max", type=float, default=S)
        p.add_argument("--samples", type=int, default=S, help="log-spaced h samples")
        p.add_argument("--tol", type=float, default=S, help="relative tolerance")
        p.add_argument("--mu", type=float, default=S, help="viscosity")
        p.add_argument("--out", default=S, help="output path ('-' for stdout)")
        p.add_argument("--seed", type=int, default=S)
        p.add_argument("--jobs", type=int, default=S, help="worker processes")
        p.add_argument("--config", default=None, help="config file or previous output")
        p.add_argument("--plot-script", dest="plot_script", default=S,
                       help="also write a gnuplot script here")

    p = sub.add_parser("field-probe", help="evaluate the test field at gap points")
    common(p)
    p.add_argument("--h", type=_floats, default=S)
    p.add_argument("--where", choices=["random", "solid", "wall", "axis", "custom"], default=S)
    p.add_argument("--n-points", dest="n_points", type=int, default=S)
    p.add_argument("--points", type=_floats, default=S, help="x1,x2,x1,x2,... for --where custom")
    p.add_argument("--fd-tol", dest="fd_tol", type=float, default=S)

    for name, text in (("sweep-norms", "gap norms of the test field over h"),
                       ("drag-table", "drag functional and lubrication oracle over h"),
                       ("sweep", "norm and drag tables with fitted exponents")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--r2-floor", dest="r2_floor", type=float, default=S)
        if name != "sweep-norms":
            p.add_argument("--no-check", dest="check", action="store_false", default=S,
                           help="skip the direct/by-parts pairing cross-check")

    p = sub.add_parser("fall", help="quasi-static fall simulation")
    common(p)
    p.add_argument("--h0", type=float, default=S)
    p.add_argument("--G", type=float, default=S, help="net driving force")
    p.add_argument("--drag", choices=["computed", "power"], default=S)
    p.add_argument("--K", type=float, default=S, help="power-law drag prefactor")
    p.add_argument("--beta", type=float, default=S, help="power-law drag exponent")
    p.add_argument("--h-contact", dest="h_contact", type=float, default=S)
    p.add_argument("--t-max", dest="t_max", type=float, default=S)
    p.add_argument("--summary", default=S, help="JSON summary path")

    p = sub.add_parser("bmo-check", help="BMO seminorms of catalog functions")
    common(p)
    p.add_argument("--functions", type=_strs, default=S)
    p.add_argument("--resolutions", type=_ints, default=S)
    p.add_argument("--p", type=float, default=S)
    p.add_argument("--theta", type=float, default=S)

    p = sub.add_parser("lemma10", help="model integral sweep and regime")
    common(p)
    p.add_argument("--p", type=float, default=S)
    p.add_argument("--q", type=float, default=S)
    return parser


def _coerce(value):
    try:
        return json.loads(value)
    except (TypeError, ValueError):
        return value


def load_config(path):
    """Read ``key = value`` pairs, a JSON object, or the header of a previous output."""
    text = Path(path).read_text()
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if first.startswith("# config:"):
        return json.loads(first[len("# config:"):])
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        return data.get("config", data)
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not stripped.startswith("["):
        text = "[run]\n" + text
    cp.read_string(text)
    out = {}
    for section in cp.sections():
        for key, value in cp[section].items():
            out[key.replace("-", "_")] = _coerce(value)
    return out


def resolve_config(args):
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(COMMAND_DEFAULTS[args.command])
    if args.config:
        loaded = load_config(args.config)
        loaded.pop("command", None)
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        cfg[key] = value
    if cfg["jobs"] is None:
        cfg["jobs"] = os.cpu_count() or 1
    cfg["command"] = args.command
    return cfg


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def validate(cfg):
    """Check every numeric field against the owning module's preconditions."""
    cmd = cfg["command"]
    cfg["alpha"] = [float(a) for a in _as_list(cfg["alpha"])]
    if not cfg["alpha"]:
        raise UsageError("alpha list is empty")
    for a in cfg["alpha"]:
        geometry.RoughProfile(a, cfg["delta"])
    if not 0 < cfg["h_min"] < cfg["h_max"]:
        raise UsageError("need 0 < h_min < h_max")
    if int(cfg["samples"]) < 3:
        raise UsageError("need at least 3 h samples")
    if not cfg["tol"] > 0 or not cfg["mu"] > 0:
        raise UsageError("tol and mu must be positive")
    if int(cfg["jobs"]) < 1:
        raise UsageError("jobs must be at least 1")
    if cmd == "field-probe":
        cfg["h"] = [float(h) for h in _as_list(cfg["h"])]
        if not cfg["h"] or any(h <= 0 for h in cfg["h"]):
            raise UsageError("probe gap distances must be positive")
        if cfg["where"] == "custom":
            pts = _as_list(cfg["points"] or [])
            if len(pts) < 2 or len(pts) % 2:
                raise UsageError("--points needs x1,x2 pairs")
        elif int(cfg["n_points"]) < 1:
            raise UsageError("n_points must be positive")
    if cmd == "fall":
        if len(cfg["alpha"]) != 1 and cfg["drag"] == "computed":
            raise UsageError("fall takes a single alpha")
        fall.FallParams(geometry.RoughProfile(cfg["alpha"][0], cfg["delta"]),
                        cfg["h0"], cfg["G"], cfg["mu"], "computed",
                        cfg["h_contact"], cfg["t_max"])
        if cfg["drag"] == "power":
            fall.PowerLawDrag(cfg["K"], cfg["beta"])
    if cmd == "bmo-check":
        cfg["functions"] = _as_list(cfg["functions"])
        cfg["resolutions"] = [int(n) for n in _as_list(cfg["resolutions"])]
        for name in cfg["functions"]:
            if name not in bmo.CATALOG:
                raise UsageError(f"unknown catalog function {name!r}")
        if not cfg["resolutions"] or any(n < 8 for n in cfg["resolutions"]):
            raise UsageError("resolutions must be at least 8")
        if not cfg["p"] >= 1 or not 0 < cfg["theta"] < 1:
            raise UsageError("need p >= 1 and 0 < theta < 1")
    if cmd == "lemma10":
        if not cfg["p"] >= 0 or not cfg["q"] > 0:
            raise UsageError("need p >= 0 and q > 0")
    return cfg


# ---------------------------------------------------------------- output

def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


# where output goes and how many workers ran do not change the numbers
_NOT_RECORDED = ("out", "jobs", "plot_script", "summary")


def recorded(cfg):
    return {k: v for k, v in cfg.items() if k not in _NOT_RECORDED}


def _config_line(cfg):
    return "# config: " + json.dumps(recorded(cfg), sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o)}")


def csv_text(cfg, columns, rows):
    lines = [_config_line(cfg), ",".join(columns)]
    lines += [",".join(fmt(r[c]) for c in columns) for r in rows]
    return "\n".join(lines) + "\n"


def json_text(cfg, payload):
    payload = dict(payload)
    payload["config"] = recorded(cfg)
    return json.dumps(_clean(payload), sort_keys=True, indent=2, default=_json_default) + "\n"


def _clean(o):
    """JSON has no inf/nan: encode them as strings."""
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, (float, np.floating)) and not math.isfinite(o):
        return str(float(o))
    if isinstance(o, np.generic):
        return o.item()
    return o


def write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def sibling(path, suffix):
    if path in (None, "-"):
        return None
    p = Path(path)
    return str(p.with_name(p.stem + suffix))


def gnuplot_script(data_path, columns, x="h", logscale=True):
    lines = ["set datafile separator ','", "set key autotitle columnhead"]
    if logscale:
        lines.append("set logscale xy")
    ix = columns.index(x) + 1
    plots = [f"'{data_path}' using {ix}:{i + 1} with linespoints title '{c}'"
             for i, c in enumerate(columns) if c not in (x, "alpha")]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _sweep_hs(cfg):
    return np.geomspace(cfg["h_min"], cfg["h_max"], int(cfg["samples"]))


# ---------------------------------------------------------------- workers

def _norm_row(item):
    alpha, delta, h, tol, h_max = item
    r = norms.prop8_suite(geometry.RoughProfile(alpha, delta), h, tol=tol, h_max=h_max)
    return {"alpha": alpha, "h": h, "l2_w": r.l2_w, "l2_grad_w": r.l2_grad_w,
            "weighted_sup": r.weighted_sup, "weighted_dh": r.weighted_dh,
            "outer_const": r.outer_const}


def _drag_row(item):
    alpha, delta, h, tol, h_max, mu, check = item
    s = drag.drag_coefficient(geometry.RoughProfile(alpha, delta), h, mu, tol=tol,
                              h_max=h_max, check=check)
    return {"alpha": alpha, **s.as_dict()}


def _fit_rows(rows, key, target, r2_floor):
    fit = fit_power_law([(r["h"], abs(r[key])) for r in rows])
    return {"quantity": key, "fitted": fit.exponent, "target": target,
            "prefactor": fit.prefactor, "r_squared": fit.r_squared,
            "ok": fit.r_squared >= r2_floor}


def norm_tables(cfg):
    hs = _sweep_hs(cfg)
    items = [(a, cfg["delta"], float(h), cfg["tol"], cfg["h_max"])
             for a in cfg["alpha"] for h in hs]
    rows = _map(_norm_row, items, int(cfg["jobs"]))
    fits = []
    for a in cfg["alpha"]:
        sel = [r for r in rows if r["alpha"] == a]
        f = _fit_rows(sel, "l2_grad_w", norms.grad_norm_exponent_target(a), cfg["r2_floor"])
        f["alpha"] = a
        fits.append(f)
        for key in ("l2_w", "weighted_sup", "weighted_dh"):
            vals = [r[key] for r in sel]
            fits.append({"alpha": a, "quantity": key, "spread": max(vals) / min(vals),
                         "ok": True})
    return rows, fits


def drag_tables(cfg):
    hs = _sweep_hs(cfg)
    items = [(a, cfg["delta"], float(h), cfg["tol"], cfg["h_max"], cfg["mu"],
              bool(cfg["check"])) for a in cfg["alpha"] for h in hs]
    rows = _map(_drag_row, items, int(cfg["jobs"]))
    fits = []
    for a in cfg["alpha"]:
        sel = sorted((r for r in rows if r["alpha"] == a), key=lambda r: r["h"])
        table = drag.DragTable().fit([r["h"] for r in sel], [r["n"] for r in sel])
        h0 = sel[-1]["h"]
        for r in sel:
            r["N"] = table.potential(r["h"], h0)
        target = -drag.drag_exponent(a)
        for key in ("dirichlet", "n", "reynolds"):
            f = _fit_rows(sel, key, target, cfg["r2_floor"])
            f["alpha"] = a
            fits.append(f)
    return rows, fits


def _print_fits(fits, stream):
    for f in fits:
        if "fitted" in f:
            stream.write(f"alpha={fmt(f['alpha'])} {f['quantity']}: fitted {f['fitted']:.4f}, "
                         f"target {f['target']:.4f}, r_squared {f['r_squared']:.6f}\n")
        else:
            stream.write(f"alpha={fmt(f['alpha'])} {f['quantity']}: max/min {f['spread']:.4f}\n")


def _emit_table(cfg, columns, rows, fits, out):
    write(out, csv_text(cfg, columns, rows))
    fit_path = sibling(out, ".fits.json")
    if fit_path:
        write(fit_path, json_text(cfg, {"fits": fits}))
    if cfg.get("plot_script"):
        write(cfg["plot_script"], gnuplot_script(out, columns))
    info = sys.stderr if out in (None, "-") else sys.stdout
    _print_fits(fits, info)
    return EXIT_OK if all(f["ok"] for f in fits) else EXIT_NUMERIC


# ---------------------------------------------------------------- commands

def cmd_sweep_norms(cfg):
    rows, fits = norm_tables(cfg)
    return _emit_table(cfg, NORM_COLUMNS, rows, fits, cfg["out"])


def cmd_drag_table(cfg):
    rows, fits = drag_tables(cfg)
    return _emit_table(cfg, DRAG_COLUMNS, rows, fits, cfg["out"])


def cmd_sweep(cfg):
    out = cfg["out"]
    norm_out = sibling(out, ".norms.csv") if out not in (None, "-") else "-"
    drag_out = sibling(out, ".drag.csv") if out not in (None, "-") else "-"
    rows, fits = norm_tables(cfg)
    code1 = _emit_table(cfg, NORM_COLUMNS, rows, fits, norm_out)
    rows, fits2 = drag_tables(cfg)
    code2 = _emit_table(cfg, DRAG_COLUMNS, rows, fits2, drag_out)
    if out not in (None, "-"):
        write(out if out.endswith(".json") else out + ".json",
              json_text(cfg, {"fits": fits + fits2}))
    return max(code1, code2)


def probe_point(profile, h, x1, x2, mu):
    """Field sample plus five-point finite-difference cross-checks."""
    sample = field.field_sample(profile, h, x1, x2, mu)
    out = sample.as_dict()
    out["fd"] = field.finite_difference_check(profile, h, x1, x2, mu, sample) \
        if sample.finite else None
    return out


def _probe_points(cfg, profile, h, rng):
    where = cfg["where"]
    n = int(cfg["n_points"])
    if where == "custom":
        pts = np.array(_as_list(cfg["points"]), dtype=float).reshape(-1, 2)
        return pts[:, 0], pts[:, 1]
    x1, x2 = field.random_gap_points(profile, h, n, rng)
    if where == "solid":
        x2 = geometry.gamma(profile, h, x1)
    elif where == "wall":
        x2 = np.zeros_like(x1)
    elif where == "axis":
        x1 = np.zeros_like(x1)
        x2 = rng.uniform(0, h, n)
    return x1, x2


def cmd_field_probe(cfg):
    rng = np.random.default_rng(cfg["seed"])
    reports = []
    worst = {"divergence": 0.0, "grad": 0.0, "dh": 0.0, "residual": 0.0}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonFiniteWarning)
        for a in cfg["alpha"]:
            profile = geometry.RoughProfile(a, cfg["delta"])
            for h in cfg["h"]:
                x1, x2 = _probe_points(cfg, profile, h, rng)
                for p1, p2 in zip(np.atleast_1d(x1), np.atleast_1d(x2)):
                    rep = probe_point(profile, h, float(p1), float(p2), cfg["mu"])
                    rep["alpha"] = a
                    reports.append(rep)
                    if math.isfinite(rep["divergence"]):
                        worst["divergence"] = max(worst["divergence"], abs(rep["divergence"]))
                    if rep["fd"]:
                        for k in ("grad", "dh", "residual"):
                            worst[k] = max(worst[k], rep["fd"][k])
    ok = worst["divergence"] <= 1e-10 and all(
        worst[k] <= cfg["fd_tol"] for k in ("grad", "dh", "residual"))
    write(cfg["out"], json_text(cfg, {"points": reports, "max": worst, "ok": ok}))
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_fall(cfg):
    profile = geometry.RoughProfile(cfg["alpha"][0], cfg["delta"])
    source = "computed" if cfg["drag"] == "computed" else fall.PowerLawDrag(cfg["K"], cfg["beta"])
    params = fall.FallParams(profile, cfg["h0"], cfg["G"], cfg["mu"], source,
                             cfg["h_contact"], cfg["t_max"])
    traj = fall.simulate_fall(params, cfg["tol"])
    pot = fall.potential_along(traj, params)
    rows = [{"t": t, "h": h, "hdot": hd, "N_of_h": N, "R_model": N + params.G * t}
            for (t, h, hd), N in zip(traj.samples, pot)]
    write(cfg["out"], csv_text(cfg, TRAJ_COLUMNS, rows))
    beta = drag.drag_exponent(profile.alpha) if cfg["drag"] == "computed" else cfg["beta"]
    summary = {
        "alpha": profile.alpha,
        "beta": beta,
        "classified": traj.classified.value,
        "contact_time": traj.contact_time,
        "threshold_time": traj.threshold_time,
        "t_max": traj.t_max,
        "h_end": traj.samples[-1][1],
        "energy_audit": fall.energy_audit(traj, params),
        "steps": traj.n_steps,
    }
    if cfg["drag"] == "power":
        summary["contact_time_closed_form"] = fall.contact_time_closed_form(
            cfg["K"], cfg["beta"], cfg["h0"], cfg["G"])
    summary_path = cfg["summary"] or sibling(cfg["out"], ".summary.json")
    text = json_text(cfg, summary)
    if summary_path:
        write(summary_path, text)
    if cfg["out"] not in (None, "-"):
        sys.stdout.write(text)
    else:
        sys.stderr.write(text)
    if cfg.get("plot_script"):
        write(cfg["plot_script"], gnuplot_script(cfg["out"], TRAJ_COLUMNS, x="t", logscale=False))
    return EXIT_OK


def bmo_report(name, n, p, theta):
    f = bmo.catalog_function(name, n)
    rep = bmo.bmo_seminorm(f)
    entry = {"function": name, "resolution": n, **rep.as_dict(),
             "lp": bmo.lp_norm(f, p), "lq": bmo.lp_norm(f, p / (1 - theta))}
    if rep.seminorm_mean > 0:
        entry["interpolation_ratio"] = bmo.interpolation_check(f, p, theta, report=rep)
        entry["h1_ratio"] = bmo.h1_embedding_check(f, report=rep)
    else:
        entry["interpolation_ratio"] = None
        entry["h1_ratio"] = None
    return entry


def _bmo_item(item):
    return bmo_report(*item)


def cmd_bmo_check(cfg):
    items = [(name, n, cfg["p"], cfg["theta"]) for name in cfg["functions"]
             for n in sorted(cfg["resolutions"])]
    entries = _map(_bmo_item, items, int(cfg["jobs"]))
    refinement = {}
    for name in cfg["functions"]:
        seq = [e for e in entries if e["function"] == name]
        ratios = []
        for prev, cur in zip(seq, seq[1:]):
            ratios.append(cur["seminorm_mean"] / prev["seminorm_mean"]
                          if prev["seminorm_mean"] > 0 else None)
        refinement[name] = ratios
    write(cfg["out"], json_text(cfg, {"reports": entries, "refinement_ratios": refinement}))
    return EXIT_OK


def cmd_lemma10(cfg):
    rows, fits = [], []
    hs = _sweep_hs(cfg)
    for a in cfg["alpha"]:
        profile = geometry.RoughProfile(a, cfg["delta"])
        regime = geometry.lemma10_classify(cfg["p"], cfg["q"], profile)
        vals = [geometry.lemma10_integral(cfg["p"], cfg["q"], profile, float(h),
                                          rtol=cfg["tol"]) for h in hs]
        rows += [{"alpha": a, "h": float(h), "value": v} for h, v in zip(hs, vals)]
        fit = fit_power_law(zip(hs, vals))
        fits.append({"alpha": a, "regime": regime.regime.value,
                     "exponent": regime.exponent, "fitted": fit.exponent,
                     "r_squared": fit.r_squared})
    out = cfg["out"]
    write(out, csv_text(cfg, ["alpha", "h", "value"], rows))
    fit_path = sibling(out, ".fits.json")
    if fit_path:
        write(fit_path, json_text(cfg, {"fits": fits}))
    if cfg.get("plot_script"):
        write(cfg["plot_script"], gnuplot_script(out, ["alpha", "h", "value"]))
    info = sys.stderr if out in (None, "-") else sys.stdout
    for f in fits:
        target = "n/a" if f["exponent"] is None else f"{f['exponent']:.4f}"
        info.write(f"alpha={fmt(f['alpha'])} regime={f['regime']} target={target} "
                   f"fitted={f['fitted']:.4f}\n")
    return EXIT_OK


COMMANDS = {
    "field-probe": cmd_field_probe,
    "sweep-norms": cmd_sweep_norms,
    "drag-table": cmd_drag_table,
    "sweep": cmd_sweep,
    "fall": cmd_fall,
    "bmo-check": cmd_bmo_check,
    "lemma10": cmd_lemma10,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = validate(resolve_config(args))
    except (UsageError, DomainError, DegenerateInputError, KeyError, ValueError,
            OSError, json.JSONDecodeError, configparser.Error) as exc:
        sys.stderr.write(f"cuspdrag {args.command}: error: {exc}\n")
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](cfg)
    except (QuadratureError, CrossCheckError, StepUnderflowError, DegenerateInputError,
            FloatingPointError) as exc:
        sys.stderr.write(f"cuspdrag {args.command}: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except DomainError as exc:
        sys.stderr.write(f"cuspdrag {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
