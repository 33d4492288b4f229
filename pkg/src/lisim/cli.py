"""Experiment runner: one CSV artifact per experiment, manifest included.

Usage: sim <experiment> [--config FILE] [--set key=value ...] --out FILE
Every output starts with '#'-prefixed manifest lines carrying the artifact
version, the experiment name, all resolved parameters and the grid axes,
so identical invocations reproduce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 precondition violation.
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .errors import ConfigError, PreconditionError
from .optimizer import kstar_exact, kstar_highsnr
from .params import SystemParams, load_config, parse_overrides
from .rate import mc_rate, mc_rate_profile, rate_upper_bound, rtilde_of_k

EXPERIMENTS = ("rate_vs_pilot", "heatmap", "bound_vs_k",
               "kstar_vs_tc", "kstar_vs_p", "table1")

COLUMNS = {
    "rate_vs_pilot": ["p_tr_dbw", "K", "t_p", "rate_mean", "rate_stderr",
                      "genie_mean", "genie_stderr"],
    "heatmap": ["K", "t_p", "rate_mean"],
    "bound_vs_k": ["m", "K", "bound", "genie_mean", "exact_mean", "exact_stderr"],
    "kstar_vs_tc": ["axis_value", "kstar_thm1", "kstar_thm2", "kstar_numeric_exact_rate"],
    "kstar_vs_p": ["axis_value", "kstar_thm1", "kstar_thm2", "kstar_numeric_exact_rate"],
    "table1": ["p_dbw", "kstar", "r_tilde", "r_mc"],
}

# Axis spellings accepted by --grid, with element type per axis.
AXIS_TYPES = {
    "ptr": float, "k": int, "tp": int, "m": float,
    "tc": int, "p": float,
}


def _parse_axis(spec: str, caster):
    """Parse 'a,b,c' or 'start:stop:step' (stop inclusive) into a list."""
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ConfigError(f"range axis must be start:stop:step (got {spec!r})")
            start, stop, step = (caster(p) for p in parts)
            if step <= 0 or stop < start:
                raise ConfigError(f"bad range {spec!r}: need step > 0 and stop >= start")
            if caster is int:
                values = list(range(start, stop + 1, step))
            else:
                n = int(np.floor((stop - start) / step + 1e-9)) + 1
                values = [start + i * step for i in range(n)]
        else:
            values = [caster(p) for p in spec.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse axis value in {spec!r}") from exc
    if not values:
        raise ConfigError(f"axis spec {spec!r} produced no values")
    return values


def _default_axes(experiment: str, params: SystemParams) -> dict:
    if experiment == "rate_vs_pilot":
        return {"ptr": [-20.0, -10.0, 0.0], "k": [8, 32], "tp": None}
    if experiment == "heatmap":
        return {"k": list(range(4, 65, 4)), "tp": list(range(5, 96, 6))}
    if experiment == "bound_vs_k":
        return {"m": [0.5, 1.0], "k": [8, 16, 24, 32, 40, 48, 56, 64]}
    if experiment == "kstar_vs_tc":
        return {"tc": [200, 500, 1000, 2000, 5000]}
    if experiment == "kstar_vs_p":
        return {"p": [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]}
    if experiment == "table1":
        return {"p": [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]}
    raise ConfigError(f"unknown experiment {experiment!r}")


def _check_pilot_point(K: int, t_p: int, t_c: int):
    if t_p < K + 1:
        raise PreconditionError(
            f"grid point violates the existence condition T_p >= K+1 "
            f"(got T_p={t_p}, K={K})")
    if not (1 <= t_p < t_c):
        raise PreconditionError(f"grid point needs 1 <= t_p < t_c (got t_p={t_p}, t_c={t_c})")


def _numeric_kstar_grid(k_center: int, t_c: int):
    # Coarse window around the analytic optimum; shared-draw profile makes
    # the argmax stable even at moderate trial counts.
    lo = max(1, int(round(0.6 * k_center)))
    hi = min(t_c - 2, int(round(1.4 * k_center)))
    if hi <= lo:
        return [max(1, min(k_center, t_c - 2))]
    grid = np.unique(np.linspace(lo, hi, 9).round().astype(int))
    return [int(k) for k in grid]


def build_grid(experiment: str, params: SystemParams, axes: dict):
    """Expand axes into the ordered list of grid points, validating all
    preconditions before any computation starts."""
    if experiment == "rate_vs_pilot":
        points = []
        for ptr in axes["ptr"]:
            for k in axes["k"]:
                tps = axes["tp"] if axes["tp"] is not None \
                    else [k + 1 + off for off in range(0, 61, 5)]
                for tp in tps:
                    _check_pilot_point(k, tp, params.t_c)
                    points.append((float(ptr), int(k), int(tp)))
        return points
    if experiment == "heatmap":
        points = []
        for k in axes["k"]:
            for tp in axes["tp"]:
                if tp < k + 1:
                    continue  # below the estimability diagonal, cell omitted
                if not (1 <= tp < params.t_c):
                    raise PreconditionError(
                        f"grid point needs 1 <= t_p < t_c (got t_p={tp}, t_c={params.t_c})")
                points.append((int(k), int(tp)))
        if not points:
            raise PreconditionError("heatmap grid has no cells with T_p >= K+1")
        return points
    if experiment == "bound_vs_k":
        points = []
        for m in axes["m"]:
            if m < 0.5:
                raise PreconditionError(f"Nakagami parameter must be >= 0.5 (got {m})")
            for k in axes["k"]:
                _check_pilot_point(k, k + 1, params.t_c)
                points.append((float(m), int(k)))
        return points
    if experiment == "kstar_vs_tc":
        for tc in axes["tc"]:
            if tc < 3:
                raise PreconditionError(f"t_c must be >= 3 (got {tc})")
        return [(int(tc),) for tc in axes["tc"]]
    if experiment in ("kstar_vs_p", "table1"):
        return [(float(p),) for p in axes["p"]]
    raise ConfigError(f"unknown experiment {experiment!r}")


def compute_point(experiment: str, params: SystemParams, point):
    """Compute one output row. Pure in (experiment, params, point)."""
    if experiment == "rate_vs_pilot":
        ptr, k, tp = point
        pt = replace(params, p_pilot_dbw=ptr)
        est = mc_rate(pt, k, tp, "estimated")
        gen = mc_rate(pt, k, tp, "genie")
        return (ptr, k, tp, est.mean_bps_hz, est.std_error,
                gen.mean_bps_hz, gen.std_error)
    if experiment == "heatmap":
        k, tp = point
        est = mc_rate(params, k, tp, "estimated")
        return (k, tp, est.mean_bps_hz)
    if experiment == "bound_vs_k":
        m, k = point
        pm = replace(params, m1=m, m2=m, m3=m)
        bound = rate_upper_bound(pm, k, k + 1)
        gen = mc_rate(pm, k, k + 1, "genie")
        est = mc_rate(pm, k, k + 1, "estimated")
        return (m, k, bound, gen.mean_bps_hz, est.mean_bps_hz, est.std_error)
    if experiment == "kstar_vs_tc":
        (tc,) = point
        return _kstar_row(replace(params, t_c=tc), tc)
    if experiment == "kstar_vs_p":
        (p,) = point
        return _kstar_row(replace(params, p_data_dbw=p), p)
    if experiment == "table1":
        (p,) = point
        pt = replace(params, p_data_dbw=p)
        ks = kstar_exact(pt).k_star
        r_tilde = rtilde_of_k(pt, ks)
        r_mc = mc_rate(pt, ks, ks + 1, "estimated")
        return (p, ks, r_tilde, r_mc.mean_bps_hz)
    raise ConfigError(f"unknown experiment {experiment!r}")


def _kstar_row(pt: SystemParams, axis_value):
    thm1 = kstar_exact(pt)
    thm2 = kstar_highsnr(pt)
    grid = _numeric_kstar_grid(thm1.k_star, pt.t_c)
    profile = mc_rate_profile(replace(pt, p_pilot_dbw=0.0), grid, "estimated")
    numeric = grid[int(np.argmax([r.mean_bps_hz for r in profile]))]
    return (axis_value, thm1.k_star, thm2.k_star, numeric)


def _job(task):
    experiment, params, point = task
    return compute_point(experiment, params, point)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def manifest_lines(experiment: str, params: SystemParams, axes: dict):
    lines = [f"# lisim {__version__} experiment={experiment}"]
    for key, val in params.as_dict().items():
        lines.append(f"# {key} = {_fmt(val)}")
    for name in sorted(axes):
        vals = axes[name]
        shown = "auto" if vals is None else ",".join(_fmt(v) for v in vals)
        lines.append(f"# axis {name} = {shown}")
    return lines


def write_csv(path, experiment: str, params: SystemParams, axes: dict, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in manifest_lines(experiment, params, axes):
            fh.write(line + "\n")
        fh.write(",".join(COLUMNS[experiment]) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def run_experiment(experiment: str, params: SystemParams, axes: dict,
                   out_path, workers: int = 1):
    """Validate the grid, compute all rows, then write the CSV.

    Rows are buffered and written in grid order after every point
    succeeded, so a failing point never leaves a partial file behind.
    """
    points = build_grid(experiment, params, axes)
    tasks = [(experiment, params, point) for point in points]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_job, tasks))
    else:
        rows = [_job(task) for task in tasks]
    write_csv(out_path, experiment, params, axes, rows)
    return len(rows)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Surface-assisted link simulator: run one experiment, write one CSV.")
    parser.add_argument("experiment", nargs="?", choices=EXPERIMENTS,
                        help="experiment to run")
    parser.add_argument("--config", help="flat key = value parameter file")
    parser.add_argument("--set", dest="sets", action="append", default=[],
                        metavar="KEY=VALUE", help="override one parameter (repeatable)")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--seed", type=int, help="override the RNG seed")
    parser.add_argument("--trials", type=int, help="override the Monte-Carlo trial count")
    parser.add_argument("--grid", dest="grids", action="append", default=[],
                        metavar="AXIS=SPEC",
                        help="override a grid axis, e.g. k=8,16,32 or tp=5:95:6 (repeatable)")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for grid points (default 1)")
    parser.add_argument("--list-experiments", action="store_true",
                        help="list experiment names and exit")
    return parser


def _resolve_params(args):
    overrides = parse_overrides(args.sets)
    specified = set(overrides)
    if args.seed is not None:
        overrides["seed"] = args.seed
        specified.add("seed")
    if args.trials is not None:
        overrides["n_trials"] = args.trials
        specified.add("n_trials")
    if args.config:
        params = load_config(args.config, overrides)
        # file keys count as user-specified even when not overridden
        probe = load_config(args.config)
        specified |= {k for k, v in probe.as_dict().items()
                      if v != getattr(SystemParams(), k)}
    else:
        params = SystemParams(**overrides)
    return params, specified


def _resolve_axes(experiment: str, params: SystemParams, grid_args):
    axes = _default_axes(experiment, params)
    for spec in grid_args:
        if "=" not in spec:
            raise ConfigError(f"--grid expects AXIS=SPEC, got {spec!r}")
        name, text = spec.split("=", 1)
        name = name.strip()
        if name not in axes:
            raise ConfigError(
                f"experiment {experiment!r} has no axis {name!r} "
                f"(axes: {', '.join(sorted(axes))})")
        axes[name] = _parse_axis(text, AXIS_TYPES[name])
    return axes


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.list_experiments:
        for name in EXPERIMENTS:
            print(name)
        return 0
    try:
        if not args.experiment:
            raise ConfigError("no experiment given (see --list-experiments)")
        if not args.out:
            raise ConfigError("--out is required")
        params, specified = _resolve_params(args)
        if args.experiment == "table1":
            # This experiment reproduces a long-coherence reference setup;
            # the block length defaults to 2000 unless the user pinned one.
            if "t_c" not in specified:
                params = replace(params, t_c=2000)
        axes = _resolve_axes(args.experiment, params, args.grids)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    try:
        n = run_experiment(args.experiment, params, axes, args.out, args.workers)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {n} rows to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
