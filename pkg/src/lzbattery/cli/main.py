"""``lzbattery`` command line: trace, sweep, wmax, validate, presets.

Exit codes: 0 success, 1 failed check or unconverged propagation,
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import itertools
import os
import sys

from .. import __version__
from ..dynamics import Linear, NoDrive, PropagationSettings, Sinusoidal
from ..energetics import charge
from ..operators import ChainSpec, LongRange, NearestNeighbor
from ..sweep import run_grid, wmax_table
from ..validation import run_checks
from .config import KEYS, ConfigError, ExperimentConfig, format_number, parse_file, parse_value
from .presets import PANELS, PRESETS

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CURVE_KEYS = ("n_spins", "coupling", "g", "gamma", "drive", "v", "omega")


class UsageError(Exception):
    pass


def _coupling(cfg, name=None):
    name = name or cfg["coupling"]
    return NearestNeighbor() if name == "nn" else LongRange(cfg["lr_exponent"])


def _drive(cfg, name=None, v=None, omega=None):
    name = name or cfg["drive"]
    v = cfg["v"] if v is None else v
    omega = cfg["omega"] if omega is None else omega
    if name == "linear":
        return Linear(v)
    if name == "sin":
        return Sinusoidal(v, omega)
    return NoDrive()


def _spec(cfg, **override):
    values = {k: cfg[k] for k in ("n_spins", "g", "gamma")}
    values.update({k: v for k, v in override.items() if k in values})
    return ChainSpec(n_spins=int(values["n_spins"]), g=values["g"], gamma=values["gamma"],
                     coupling=_coupling(cfg, override.get("coupling")), field_b=cfg["b"])


def _settings(cfg):
    return PropagationSettings(dt_initial=cfg["dt_initial"], rel_tol=cfg["rel_tol"],
                               max_halvings=cfg["max_halvings"])


def _list_keys(cfg, allowed=()):
    keys = [k for k in CURVE_KEYS if isinstance(cfg.get(k), list) and k not in allowed]
    return keys


def _open_out(cfg, name):
    out = cfg["out"]
    try:
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, name)
        with open(path, "a", encoding="utf-8"):
            pass
    except OSError as exc:
        raise UsageError(f"cannot write to output directory {out!r}: {exc}") from None
    return path


def _write_csv(path, command, cfg, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# lzbattery {__version__} {command} {cfg.describe()}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def cmd_trace(cfg) -> int:
    lists = _list_keys(cfg)
    if len(lists) > 1:
        raise UsageError(f"trace accepts at most one list-valued key, got {', '.join(lists)}")
    path = _open_out(cfg, "trace.csv")
    if lists:
        key = lists[0]
        curves = [(f"{key}={format_number(v) if isinstance(v, float) else v}", {key: v})
                  for v in cfg[key]]
    else:
        curves = [("single", {})]
    rows = []
    status = EXIT_OK
    for label, override in curves:
        spec = _spec(cfg, **override)
        drive = _drive(cfg, override.get("drive"), override.get("v"), override.get("omega"))
        trace = charge(spec, drive, cfg["tau_max"], cfg["n_samples"], _settings(cfg),
                       require_converged=False)
        if not trace.converged:
            print(f"curve {label}: propagation did not converge", file=sys.stderr)
            status = EXIT_FAIL
        b = spec.field_b
        for tau, w, p in zip(trace.taus, trace.work / b, trace.power / b ** 2):
            rows.append((format_number(tau), format_number(w), format_number(p), label))
    _write_csv(path, "trace", cfg, "tau,W_over_B,P_over_B2,curve_label", rows)
    return status


def cmd_sweep(cfg) -> int:
    if cfg.get("axis1") is None or cfg.get("axis1_values") is None:
        raise UsageError("sweep needs axis1 and axis1_values")
    axes = {cfg["axis1"]: cfg["axis1_values"]}
    if cfg.get("axis2") is not None or cfg.get("axis2_values") is not None:
        if cfg.get("axis2") is None or cfg.get("axis2_values") is None:
            raise UsageError("axis2 and axis2_values must be given together")
        if cfg["axis2"] == cfg["axis1"]:
            raise UsageError("axis1 and axis2 must differ")
        axes[cfg["axis2"]] = cfg["axis2_values"]
    lists = _list_keys(cfg)
    if lists:
        raise UsageError(f"sweep takes single values outside the axes, got lists for {', '.join(lists)}")
    grid_path = _open_out(cfg, "grid.csv")
    meta_path = _open_out(cfg, "meta.csv")
    base = _spec(cfg)
    grid = run_grid(base, _drive(cfg), axes, cfg["tau_max"], cfg["n_samples"], _settings(cfg),
                    n_jobs=cfg["n_jobs"])
    names = grid.axis_names
    rows, meta = [], []
    b = base.field_b
    for index in _indices(grid.work.shape[:-1]):
        a1 = format_number(grid.axis_values[0][index[0]])
        a2 = format_number(grid.axis_values[1][index[1]]) if len(names) == 2 else ""
        for tau, w in zip(grid.taus, grid.work[index] / b):
            rows.append((a1, a2, format_number(tau), format_number(w)))
        meta.append((a1, a2, format_number(grid.dt_used[index]), str(int(grid.converged[index])),
                     str(int(grid.degenerate[index]))))
    _write_csv(grid_path, "sweep", cfg, "axis1,axis2,tau,W_over_B", rows)
    _write_csv(meta_path, "sweep", cfg, "axis1,axis2,dt_used,converged,degenerate", meta)
    if not grid.converged.all():
        print(f"{int((~grid.converged).sum())} grid cells did not converge", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _indices(shape):
    return itertools.product(*(range(n) for n in shape))


def cmd_wmax(cfg) -> int:
    if cfg.get("n_values") is None:
        raise UsageError("wmax needs n_values")
    if cfg["n_samples"] < 2000:
        raise UsageError("wmax needs n_samples >= 2000")
    lists = _list_keys(cfg, allowed=("coupling", "drive"))
    if lists:
        raise UsageError(f"wmax takes single values for {', '.join(lists)}")
    path = _open_out(cfg, "wmax.csv")
    couplings = cfg["coupling"] if isinstance(cfg["coupling"], list) else [cfg["coupling"]]
    drives = cfg["drive"] if isinstance(cfg["drive"], list) else [cfg["drive"]]
    base = ChainSpec(n_spins=1, g=cfg["g"], gamma=cfg["gamma"], field_b=cfg["b"])
    n_values = [int(n) for n in cfg["n_values"]]
    if any(n != v for n, v in zip(n_values, cfg["n_values"])):
        raise UsageError("n_values must be integers")
    records = wmax_table(n_values, base, [_drive(cfg, d) for d in drives],
                         [_coupling(cfg, c) for c in couplings], cfg["tau_max"], _settings(cfg),
                         cfg["n_samples"], n_jobs=cfg["n_jobs"])
    rows = []
    for rec in records:
        rows.append((str(rec.spec.n_spins), rec.spec.coupling.label(), rec.drive.label(),
                     format_number(rec.w_max / rec.spec.field_b), format_number(rec.tau_at_max)))
    _write_csv(path, "wmax", cfg, "N,coupling,protocol,W_max_over_B,tau_at_max", rows)
    return EXIT_OK


def cmd_validate(cfg) -> int:
    ok = True
    for name, passed, detail in run_checks(settings=_settings(cfg)):
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}", flush=True)
        ok &= passed
    print("all checks passed" if ok else "some checks FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_presets(cfg) -> int:
    for name, (command, _) in PRESETS.items():
        print(f"{name:6s} {command:6s} {PANELS[name]}")
    return EXIT_OK


COMMANDS = {
    "trace": cmd_trace,
    "sweep": cmd_sweep,
    "wmax": cmd_wmax,
    "validate": cmd_validate,
    "presets": cmd_presets,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lzbattery", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lzbattery {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--preset", help="figure preset, e.g. fig1a (see `lzbattery presets`)")
        for key in KEYS:
            p.add_argument(f"--{key}", dest=f"opt_{key}", metavar="VALUE")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        layers = []
        if args.preset:
            if args.preset not in PRESETS:
                raise UsageError(f"unknown preset {args.preset!r}; see `lzbattery presets`")
            command, values = PRESETS[args.preset]
            if command != args.command:
                raise UsageError(f"preset {args.preset} belongs to the {command!r} command")
            layers.append(values)
        if args.config:
            try:
                layers.append(parse_file(args.config))
            except OSError as exc:
                raise UsageError(f"cannot read config: {exc}") from None
        flags = {}
        for key in KEYS:
            text = getattr(args, f"opt_{key}")
            if text is not None:
                try:
                    flags[key] = parse_value(key, text)
                except ConfigError as exc:
                    raise ConfigError(f"--{key}: {exc}") from None
        layers.append(flags)
        cfg = ExperimentConfig.resolve(*layers)
        if cfg.get("n_samples") is None:
            cfg.values["n_samples"] = 2000 if args.command == "wmax" else 400
        return COMMANDS[args.command](cfg)
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"lzbattery {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
