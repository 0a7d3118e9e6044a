"""Command-line surface: simulate, compare, oracle, validate, conformality.

One process runs one command, selected by ``--mode``; every other flag
mirrors a RunConfig key and can also come from a flat ``key = value`` config
file (flags win). Exit codes: 0 success / all clauses pass, 1 validation
failure, 2 usage or configuration error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from .config import ConfigError, RunConfig, build_config, parse_config_file
from .diagnostics import validate_theorem_a, validate_theorem_b
from .equivalence import rescaling_convergence
from .flow import NumericalAbortError, run
from .shapeio import ShapeIOError, resolve_shape, save_shape, shape_extension
from .transforms import (
    GaussianContext,
    conformality_defect,
    gaussian_shrink_time,
    sphere_radius_gaussian,
    sphere_radius_mcf,
    time_forward,
)

_SERIES_HEADER = "step,t,dt,area,weighted_area,circumradius,roundness,max_speed"
_SERIES_COLUMNS = ("step", "t", "dt", "measure", "weighted_area",
                   "circumradius", "roundness", "max_speed")


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _emit(path, lines):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _series_lines(traj):
    lines = [_SERIES_HEADER]
    series = traj.series
    count = series["step"].size
    for i in range(count):
        row = [str(int(series["step"][i]))]
        for col in _SERIES_COLUMNS[1:]:
            value = float(series[col][i])
            if not math.isfinite(value):
                raise NumericalAbortError(
                    f"non-finite {col} at step {int(series['step'][i])}")
            row.append(_fmt(value))
        lines.append(",".join(row))
    return lines


def _write_trajectory(traj, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    _emit(os.path.join(out_dir, "series.csv"), _series_lines(traj))
    ext = shape_extension(traj.initial.shape)
    for state in traj.snapshots:
        save_shape(state.shape, os.path.join(out_dir, f"snap_{state.step}.{ext}"))
    p = traj.params
    report = [
        "run report",
        f"mode = {traj.mode}",
        f"status = {traj.status}" + (f" ({traj.final.note})" if traj.final.note else ""),
        f"terminal_time = {_fmt(traj.final.t)}",
        f"steps = {traj.step_count()}",
        f"epsilon = {p.epsilon}",
        f"mu = {_fmt(p.mu)}",
        f"cfl = {_fmt(p.cfl)}",
        f"shrink_diameter_tol = {_fmt(traj.shrink_tol)}",
        f"snapshots = {len(traj.snapshots)}",
    ]
    if traj.step_count():
        s = traj.series
        report += [
            f"initial_measure = {_fmt(s['measure'][0])}",
            f"final_measure = {_fmt(s['measure'][-1])}",
            f"initial_circumradius = {_fmt(s['circumradius'][0])}",
            f"final_circumradius = {_fmt(s['circumradius'][-1])}",
        ]
    _emit(os.path.join(out_dir, "report.txt"), report)


def _cmd_simulate(cfg: RunConfig) -> int:
    if not cfg.out:
        raise ConfigError("mode 'simulate' needs --out")
    shape = resolve_shape(cfg.shape, cfg.auto_orient)
    traj = run(shape, cfg.flow_params(), mode=cfg.flow,
               snapshot_stride=cfg.snapshot_stride)
    _write_trajectory(traj, cfg.out)
    print(f"simulate: {cfg.shape} -> {traj.status} at t={_fmt(traj.final.t)} "
          f"({traj.step_count()} steps), wrote {cfg.out}")
    return 0


def _cmd_compare(cfg: RunConfig) -> int:
    shape = resolve_shape(cfg.shape, cfg.auto_orient)
    t_hats = cfg.checkpoint_list()
    coarse, fine, ratios = rescaling_convergence(shape, cfg.flow_params(), t_hats)
    header = "t_hat,t,vertex_max,hausdorff,vertex_max_half_cfl,hausdorff_half_cfl,ratio"
    lines = [header]
    for c, f, r in zip(coarse, fine, ratios):
        lines.append(",".join([
            _fmt(c.t_hat), _fmt(c.t), _fmt(c.vertex_max), _fmt(c.hausdorff),
            _fmt(f.vertex_max), _fmt(f.hausdorff), _fmt(r)]))
    print("\n".join(lines))
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        _emit(os.path.join(cfg.out, "compare.csv"), lines)
    return 0


def _cmd_oracle(cfg: RunConfig) -> int:
    ctx = GaussianContext(cfg.epsilon, cfg.mu, cfg.n)
    T = gaussian_shrink_time(cfg.rho0, ctx)
    t_end = T if math.isfinite(T) else (cfg.max_time if math.isfinite(cfg.max_time) else 1.0)
    ts = np.linspace(0.0, t_end, max(2, cfg.samples))
    lines = ["t,t_hat,radius_density_flow,radius_ordinary_flow_hat"]
    for t in ts:
        t_hat = time_forward(float(t), ctx)
        r_g = sphere_radius_gaussian(cfg.rho0, float(t), ctx)
        r_m = sphere_radius_mcf(cfg.rho0, t_hat, ctx.n)
        lines.append(",".join([
            _fmt(t), _fmt(t_hat),
            _fmt(r_g) if r_g is not None else "0",
            _fmt(r_m) if r_m is not None else "0"]))
    print("\n".join(lines))
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        _emit(os.path.join(cfg.out, "oracle.csv"), lines)
    return 0


def _cmd_validate(cfg: RunConfig) -> int:
    case = cfg.case
    want_eps = 1 if case == "a" else -1
    if cfg.epsilon != want_eps:
        raise ConfigError(f"case '{case}' needs epsilon = {want_eps:+d}")
    shape = resolve_shape(cfg.shape, cfg.auto_orient)
    params = cfg.flow_params()
    checkpoint_times = ()
    if case == "bii" and not math.isfinite(params.max_inradius) \
            and not math.isfinite(params.max_time):
        params = replace(params, max_inradius=10.0 / params.mu)
    if case == "biii":
        from .geometry import centroid

        off_center = float(np.linalg.norm(centroid(shape))) > 1e-9 / params.mu
        if off_center:
            if not math.isfinite(params.max_time):
                params = replace(params, max_time=1.0)
            checkpoint_times = (params.max_time / 2.0, params.max_time)
    traj = run(shape, params, mode="density", snapshot_stride=cfg.snapshot_stride,
               checkpoint_times=checkpoint_times)
    if case == "a":
        report = validate_theorem_a(traj)
    else:
        report = validate_theorem_b(traj, case)
    print(report.to_text())
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        _emit(os.path.join(cfg.out, "report.txt"), report.to_text().splitlines())
        _emit(os.path.join(cfg.out, "report.kv"), report.to_kv().splitlines())
    if not report.applicable:
        raise ConfigError(f"case '{case}' hypotheses violated: {report.reason}")
    return 0 if report.passed else 1


def _conformality_field(cfg: RunConfig):
    spec = cfg.field.strip().lower()
    ctx = GaussianContext(cfg.epsilon, cfg.mu, cfg.n)
    if spec == "gaussian":
        return lambda r: ctx.epsilon * ctx.rate * r
    if spec == "zero":
        return lambda r: 0.0
    if spec.startswith("power:"):
        parts = spec.split(":", 1)[1].split(",")
        try:
            k = float(parts[0])
            c = float(parts[1]) if len(parts) > 1 else 1.0
        except (ValueError, IndexError):
            raise ConfigError(f"bad power field spec '{cfg.field}'")
        return lambda r: c * r ** k
    raise ConfigError(f"unknown conformality field '{cfg.field}'")


def _cmd_conformality(cfg: RunConfig) -> int:
    if not (0 < cfg.r_min < cfg.r_max and cfg.r_count >= 2):
        raise ConfigError("need 0 < r_min < r_max and r_count >= 2")
    dphi = _conformality_field(cfg)
    radii = np.linspace(cfg.r_min, cfg.r_max, cfg.r_count)
    lines = ["r,defect"]
    for r in radii:
        lines.append(f"{_fmt(r)},{_fmt(conformality_defect(dphi, [float(r)]))}")
    overall = conformality_defect(dphi, radii)
    lines.append(f"max,{_fmt(overall)}")
    print("\n".join(lines))
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        _emit(os.path.join(cfg.out, "conformality.csv"), lines)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "oracle": _cmd_oracle,
    "validate": _cmd_validate,
    "conformality": _cmd_conformality,
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="densityflow",
        description="Curvature flow with a Gaussian-type density: simulation, "
                    "oracles and validation.",
    )
    p.add_argument("--mode", required=True,
                   choices=sorted(_COMMANDS), help="command to run")
    p.add_argument("--config", help="flat 'key = value' config file")
    p.add_argument("--shape", help="generator spec (e.g. circle:1,256) or file path")
    p.add_argument("--out", help="output directory")
    p.add_argument("--flow", choices=("density", "ordinary", "rescaled"))
    p.add_argument("--epsilon", type=int, choices=(-1, 1))
    p.add_argument("--mu", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--max-dt", dest="max_dt", type=float)
    p.add_argument("--max-time", dest="max_time", type=float)
    p.add_argument("--max-steps", dest="max_steps", type=int)
    p.add_argument("--resample-every", dest="resample_every", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--snapshot-stride", dest="snapshot_stride", type=int)
    p.add_argument("--shrink-diameter-tol", dest="shrink_diameter_tol", type=float)
    p.add_argument("--roundness-tol", dest="roundness_tol", type=float)
    p.add_argument("--guard", type=float)
    p.add_argument("--fixed-point-tol", dest="fixed_point_tol", type=float)
    p.add_argument("--max-inradius", dest="max_inradius", type=float)
    p.add_argument("--auto-orient", dest="auto_orient", action="store_const", const=True)
    p.add_argument("--density", choices=("gaussian", "none"))
    p.add_argument("--case", choices=("a", "bi", "bii", "biii"))
    p.add_argument("--checkpoints", help="comma-separated checkpoint times")
    p.add_argument("--rho0", type=float, help="oracle initial sphere radius")
    p.add_argument("--n", type=int, choices=(1, 2), help="oracle dimension")
    p.add_argument("--samples", type=int, help="oracle table rows")
    p.add_argument("--field", help="conformality field: gaussian|zero|power:k[,C]")
    p.add_argument("--r-min", dest="r_min", type=float)
    p.add_argument("--r-max", dest="r_max", type=float)
    p.add_argument("--r-count", dest="r_count", type=int)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {key: value for key, value in vars(args).items()
                 if key != "config" and value is not None}
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        cfg = build_config(file_values, overrides)
        return _COMMANDS[cfg.mode](cfg)
    except (ConfigError, ShapeIOError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalAbortError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
