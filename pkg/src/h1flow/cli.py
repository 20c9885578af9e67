"""Command-line front end: seed a curve, flow it, analyse the run.

Subcommands::

    h1flow evaluate CURVE.json [--out FILE]
    h1flow flow --config CONFIG.json [--config ...] --out DIR [--seed S] [--jobs J]
    h1flow flow --emit-template
    h1flow probe [--config CONFIG.json] --out DIR [--seed S] [--ell L ...]
    h1flow report RUN_DIR [--n N --m M]

Exit codes: 0 success, 2 validation failure, 3 numerical failure, 4 no
convergence within the step or time budget.
"""

from __future__ import annotations

import argparse
import copy
import dataclasses
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis as an
from . import curve as cv
from . import io
from . import seeds
from .curve import Curve
from .equilibria import EquilibriumParams, equilibrium_curve, fit_equilibrium
from .errors import (AreaCollapse, H1FlowError, InsufficientTail, NotConverged, SeriesTooShort,
                     StepFailure)
from .flow import FlowConfig, FlowState, TimeSeries, conservation_report, flow_run
from .gradients import diagnostics

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_NOT_CONVERGED = 0, 2, 3, 4

SEED_KINDS = {
    "circle": seeds.circle,
    "ellipse": seeds.ellipse,
    "perturbed_circle": seeds.perturbed_circle,
    "random": seeds.random_positive_area,
    "quadrifolium": seeds.quadrifolium,
}

DEFAULT_CONFIG = {
    "seed": {"kind": "ellipse", "params": {"a": 2.0, "b": 1.0}, "n_modes": 32},
    "flow": {k: v for k, v in dataclasses.asdict(FlowConfig(t_max=1e4)).items()},
    "analysis": {
        "reparametrize": False,
        "symmetry": {"n": 1, "m": 1},
        "require_convergence": True,
        "fit_gap": 0.01,
        "rate": {"enabled": True, "tail_fraction": 0.3, "floor": 1e-13, "floor_factor": 1e3,
                 "min_points": 10},
        "report": False,
    },
}
DEFAULT_CONFIG["flow"]["record_every"] = 0.5


class ConfigError(ValueError):
    pass


def _merge(base, override, where="config"):
    out = copy.deepcopy(base)
    for key, val in override.items():
        if key not in base:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if isinstance(base[key], dict) and key != "params":
            if not isinstance(val, dict):
                raise ConfigError(f"{where}.{key}: expected an object")
            out[key] = _merge(base[key], val, f"{where}.{key}")
        else:
            out[key] = val
    return out


def load_config(path, seed_override=None) -> dict:
    """Read a config file and fill in every default explicitly."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    base = copy.deepcopy(DEFAULT_CONFIG)
    # params replace the defaults wholesale since they depend on the seed kind
    if "seed" in raw and "params" not in raw["seed"]:
        base["seed"]["params"] = {}
    cfg = _merge(base, raw, str(path))
    if seed_override is not None:
        cfg["seed"]["params"]["rng_seed"] = int(seed_override)
    return cfg


def flow_config(cfg: dict) -> FlowConfig:
    try:
        return FlowConfig(**cfg["flow"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"flow section: {exc}") from None


def build_seed(seed_cfg: dict, base_dir: Path | None = None) -> Curve:
    kind = seed_cfg["kind"]
    params = dict(seed_cfg.get("params", {}))
    n_modes = seed_cfg.get("n_modes")
    if kind == "file":
        path = Path(params["path"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        c = io.load_curve(path)
        return c if n_modes is None else c.padded(n_modes) if n_modes >= c.n_modes else c.truncated(n_modes)
    if kind == "equilibrium":
        return equilibrium_curve(EquilibriumParams.from_dict({"c": 0.0, "d": 0.0, **params}), n_modes)
    if kind not in SEED_KINDS:
        raise ConfigError(f"seed.kind: unknown kind {kind!r}; choose from "
                          f"{sorted([*SEED_KINDS, 'equilibrium', 'file'])}")
    if n_modes is not None:
        params["n_modes"] = n_modes
    try:
        return SEED_KINDS[kind](**params)
    except TypeError as exc:
        raise ConfigError(f"seed.params: {exc}") from None


# -- subcommands ----------------------------------------------------------------


def _diag_dict(d) -> dict:
    from .flow import CSV_HEADER
    return dict(zip(CSV_HEADER, d.as_row()))


def cmd_evaluate(curve_path, out=None) -> dict:
    """Print and return every scalar functional of the curve in ``curve_path``."""
    c = io.load_curve(curve_path)
    d = _diag_dict(diagnostics(c))
    d.pop("t")
    d.pop("step")
    d = io._jsonable(d)
    for key, val in d.items():
        print(f"{key:>12} = {val}")
    if out is not None:
        io.dump_json({"source": str(curve_path), "n_modes": c.n_modes, **d}, out)
    return d


def _save_curves(curves, path):
    np.save(path, np.array([c.coeffs for c in curves]))


def _load_curves(path):
    return [Curve(a) for a in np.load(path)]


def cmd_flow(cfg: dict, out_dir, config_dir: Path | None = None) -> int:
    """Run one configured flow and write the run directory. Returns the exit code."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h = io.config_hash(cfg)
    io.dump_json({**cfg, "config_hash": h}, out / "config.json")
    fcfg = flow_config(cfg)
    acfg = cfg["analysis"]
    sym = acfg["symmetry"]

    c0 = build_seed(cfg["seed"], config_dir)
    io.save_curve(c0, out / "initial.json")
    start, roundoff = c0, 0.0
    if acfg["reparametrize"]:
        start, _, roundoff = an.prepare_initial(c0, sym["n"], sym["m"], cfg["seed"].get("n_modes"))
    io.save_curve(start, out / "prepared.json")

    manifest = {"config_hash": h, "symmetry_roundoff": roundoff}
    try:
        series, state = flow_run(start, fcfg)
    except (AreaCollapse, StepFailure) as exc:
        manifest.update(status="numerical_failure", error=f"{type(exc).__name__}: {exc}")
        io.dump_json(manifest, out / "manifest.json")
        log.error("%s", manifest["error"])
        return EXIT_NUMERICAL

    series.to_csv(out / "timeseries.csv")
    _save_curves(series.curves, out / "curves.npy")
    io.save_curve(state.curve, out / "terminal.json")
    manifest.update(termination=series.reason, t_final=state.t, steps=state.step_count,
                    records=len(series))

    try:
        cons = {**conservation_report(series).to_dict(), "config_hash": h}
    except SeriesTooShort as exc:
        cons = {"status": "skipped", "reason": str(exc), "config_hash": h}
    io.dump_json(cons, out / "conservation.json")

    fit = {"config_hash": h, "termination": series.reason, "energy_terminal": cv.energy(state.curve)}
    try:
        p, res = fit_equilibrium(state.curve, acfg["fit_gap"])
        fit["equilibrium"] = p.to_dict(res)
    except H1FlowError as exc:
        fit["equilibrium"] = {"status": "failed", "reason": str(exc)}
    q = an.quantisation_check(fit["energy_terminal"], cv.energy(start))
    fit["quantisation"] = {"ell": q.ell, "deviation": q.deviation, "ok": q.ok}
    rate_cfg = dict(acfg["rate"])
    if rate_cfg.pop("enabled"):
        try:
            fit["rate"] = an.estimate_rate(series, **rate_cfg).to_dict()
        except InsufficientTail as exc:
            fit["rate"] = {"status": "skipped", "reason": str(exc)}
    io.dump_json(fit, out / "fit.json")

    if acfg["report"] and series.reason == "grad_stop":
        rep = an.isoperimetry_report(c0, sym["n"], sym["m"], result=(series, state), prepared=start)
        rep.config_hash = h
        rep.symmetry_roundoff = roundoff
        io.dump_json(rep.to_dict(), out / "report.json")
        manifest["certified"] = rep.certified

    converged = series.reason == "grad_stop"
    manifest["status"] = "converged" if converged else "stopped"
    io.dump_json(manifest, out / "manifest.json")
    print(f"{out}: {series.reason} at t={state.t:.6g} after {state.step_count} steps, "
          f"E={fit['energy_terminal']:.12g}")
    if acfg["require_convergence"] and not converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_report(run_dir, n=None, m=None) -> dict:
    """Isoperimetry report for a completed run directory."""
    run = Path(run_dir)
    cfg = json.loads((run / "config.json").read_text())
    manifest = json.loads((run / "manifest.json").read_text())
    sym = cfg["analysis"]["symmetry"]
    n = sym["n"] if n is None else n
    m = sym["m"] if m is None else m
    if manifest.get("termination") != "grad_stop":
        raise NotConverged(f"{run}: run stopped by {manifest.get('termination')!r}")
    c0 = io.load_curve(run / "initial.json")
    prepared = io.load_curve(run / "prepared.json")
    terminal = io.load_curve(run / "terminal.json")
    series = TimeSeries.from_csv(run / "timeseries.csv", reason=manifest["termination"])
    series.curves = _load_curves(run / "curves.npy")
    state = FlowState(t=manifest["t_final"], curve=terminal, step_count=manifest["steps"])
    rep = an.isoperimetry_report(c0, n, m, result=(series, state), prepared=prepared)
    rep.config_hash = cfg.get("config_hash", "")
    d = rep.to_dict()
    io.dump_json(d, run / "report.json")
    return d


def cmd_probe(params: EquilibriumParams, out_dir, n_samples=200, ball_radius=0.05, n_modes=16,
              seed=0) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    probe = an.gradient_inequality_probe(params, n_samples, ball_radius, n_modes, seed)
    run = {"params": params.to_dict(), "n_samples": n_samples, "ball_radius": ball_radius,
           "n_modes": n_modes, "seed": seed}
    d = {**probe.to_dict(), **run, "config_hash": io.config_hash(run)}
    io.dump_json(d, out / "probe.json")
    io.save_probe_csv(probe, out / "probe.csv")
    print(f"min ratio {probe.min_ratio:.10g} over {probe.ratios.size} samples")
    return d


# -- entry point ------------------------------------------------------------------


def _run_one(args):
    path, out, seed = args
    cfg = load_config(path, seed)
    return cmd_flow(cfg, out, Path(path).parent)


def _parser():
    ap = argparse.ArgumentParser(prog="h1flow", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="print the scalar functionals of a curve file")
    p.add_argument("curve")
    p.add_argument("--out", help="also write the values as JSON")

    p = sub.add_parser("flow", help="run configured flows into run directories")
    p.add_argument("--config", action="append", default=[])
    p.add_argument("--out", default="runs")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--emit-template", action="store_true", help="print a config with every default")

    p = sub.add_parser("probe", help="sample the gradient inequality near a stationary curve")
    p.add_argument("--config", help="JSON with any of a, b, c, d, ell, n_samples, ball_radius, n_modes")
    p.add_argument("--out", default="probe")
    p.add_argument("--seed", type=int)
    for name, typ in [("a", float), ("b", float), ("c", float), ("d", float), ("ell", int),
                      ("n-samples", int), ("ball-radius", float), ("n-modes", int)]:
        p.add_argument(f"--{name}", type=typ)

    p = sub.add_parser("report", help="isoperimetry report for a completed run")
    p.add_argument("run_dir")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "evaluate":
            cmd_evaluate(args.curve, args.out)
        elif args.command == "flow":
            if args.emit_template:
                print(json.dumps(DEFAULT_CONFIG, indent=2))
                return EXIT_OK
            if not args.config:
                raise ConfigError("flow needs at least one --config")
            if len(args.config) == 1:
                jobs = [(args.config[0], args.out, args.seed)]
            else:
                jobs = [(c, str(Path(args.out) / Path(c).stem), args.seed) for c in args.config]
            for path, _, seed in jobs:
                load_config(path, seed)  # fail fast on every config
            if args.jobs > 1 and len(jobs) > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                    codes = list(pool.map(_run_one, jobs))
            else:
                codes = [_run_one(j) for j in jobs]
            return max(codes)
        elif args.command == "probe":
            opts = {"a": 1.0, "b": 0.0, "c": 0.0, "d": 0.0, "ell": 1, "n_samples": 200,
                    "ball_radius": 0.05, "n_modes": 16, "seed": 0}
            if args.config:
                opts.update(json.loads(Path(args.config).read_text()))
            for key in opts:
                val = getattr(args, key, None)
                if val is not None:
                    opts[key] = val
            params = EquilibriumParams(opts["a"], opts["b"], opts["c"], opts["d"], opts["ell"])
            cmd_probe(params, args.out, opts["n_samples"], opts["ball_radius"], opts["n_modes"], opts["seed"])
        elif args.command == "report":
            d = cmd_report(args.run_dir, args.n, args.m)
            print(json.dumps(d, indent=2))
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (AreaCollapse, StepFailure) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError, FileNotFoundError, H1FlowError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
