"""Command-line surface.

Subcommands: groundstate, evolve, oracle, analyze, fidelity, sweep,
checkpoint-info.  Every run subcommand accepts --config JSON plus flag
overrides (flags win).  Exit codes: 0 success, 2 config error, 3 capacity
error, 4 I/O error, 1 anything else.  Accuracy alarms exit 0; they are
recorded inside the analysis JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import io as sbio
from . import runner
from .config import RunConfig, SweepConfig, parse_config
from .errors import CapacityError, ConfigError, IOFormatError, SpinBatteryError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_IO = 4

# flag name -> (config key, type)
_OVERRIDE_FLAGS = {
    "N": ("N", int),
    "N_b": ("N_b", int),
    "J": ("J", float),
    "Jz": ("Jz", float),
    "junction_coupling": ("junction_coupling", float),
    "prep": ("prep", str),
    "engine": ("engine", str),
    "dt": ("dt", float),
    "t_max": ("t_max", float),
    "max_D": ("max_D", int),
    "gate_max_D": ("gate_max_D", int),
    "weight_tol": ("weight_tol", float),
    "compress_every": ("compress_every", int),
    "measurement_stride": ("measurement_stride", int),
    "checkpoint_stride": ("checkpoint_stride", int),
    "trotter_order": ("trotter_order", int),
    "trotter_scheme": ("trotter_scheme", str),
    "tau1": ("tau1", float),
    "tau2": ("tau2", float),
    "fit_tau2": ("fit_tau2", float),
    "T": ("T", float),
    "gs_max_D": ("gs_max_D", int),
    "seed": ("seed", int),
    "output_dir": ("output_dir", str),
    "label": ("label", str),
}


def _add_override_flags(sub):
    sub.add_argument("--config", help="JSON config file")
    for flag, (_, typ) in _OVERRIDE_FLAGS.items():
        sub.add_argument(f"--{flag.replace('_', '-')}", dest=f"ov_{flag}", type=typ)


def _load_config(args) -> RunConfig | SweepConfig:
    doc = {}
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ConfigError("top level: expected a JSON object")
    for flag, (key, _) in _OVERRIDE_FLAGS.items():
        val = getattr(args, f"ov_{flag}", None)
        if val is not None:
            doc[key] = val
    return parse_config(json.dumps(doc))


def _require_run_config(cfg) -> RunConfig:
    if isinstance(cfg, SweepConfig):
        raise ConfigError("this subcommand needs a single-run config, not a sweep")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbattery",
        description="XXZ chain between fully polarized spin-chain battery leads: "
                    "MPS/TEBD evolution, exact oracle, transport analysis.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("groundstate", help="DMRG ground state of the isolated system chain")
    _add_override_flags(p)

    p = subs.add_parser("evolve", help="TEBD evolution of the battery quench")
    _add_override_flags(p)
    p.add_argument("--resume", help="continue from an MPSK checkpoint")

    p = subs.add_parser("oracle", help="exact (Krylov) evolution of the battery quench")
    _add_override_flags(p)

    p = subs.add_parser("analyze", help="recompute the analysis JSON from a run directory")
    p.add_argument("run_dir", help="directory with effective_config.json and trajectory.csv")
    p.add_argument("--output", help="where to write the report (default: <run_dir>/analysis.json)")

    p = subs.add_parser("fidelity", help="ground-vs-GHZ reduced-density-matrix fidelity run")
    _add_override_flags(p)

    p = subs.add_parser("sweep", help="grid over (N, Jz) plus regime-diagram aggregation")
    _add_override_flags(p)

    p = subs.add_parser("checkpoint-info", help="inspect an MPSK checkpoint")
    p.add_argument("path")
    return parser


def _cmd_analyze(args) -> dict:
    run_dir = args.run_dir
    cfg_path = os.path.join(run_dir, "effective_config.json")
    with open(cfg_path) as fh:
        cfg = parse_config(fh.read())
    cfg = _require_run_config(cfg)
    junction_bond = cfg.N_b - 1
    record = sbio.read_trajectory_csv(os.path.join(run_dir, "trajectory.csv"),
                                      junction_bond=junction_bond)
    report = runner.analyze_record(record, cfg)
    out = args.output or os.path.join(run_dir, "analysis.json")
    sbio.write_json(out, report)
    report["out_dir"] = run_dir
    return report


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "checkpoint-info":
            info = sbio.checkpoint_info(args.path)
            json.dump(info, sys.stdout, sort_keys=True, indent=2)
            sys.stdout.write("\n")
            return EXIT_OK
        if args.command == "analyze":
            report = _cmd_analyze(args)
        elif args.command == "groundstate":
            report = runner.run_groundstate(_require_run_config(_load_config(args)))
        elif args.command == "evolve":
            cfg = _require_run_config(_load_config(args))
            if cfg.engine == "oracle":
                raise ConfigError("engine: `evolve` runs the MPS engine; use the `oracle` subcommand")
            if args.resume:
                out_dir = os.path.join(cfg.output_dir, f"{cfg.label}_resumed")
                report = runner.resume_run(cfg, args.resume, out_dir)
            else:
                report = runner.run_single(cfg)
        elif args.command == "oracle":
            cfg = _require_run_config(_load_config(args))
            cfg.engine = "oracle"
            report = runner.run_single(cfg)
        elif args.command == "fidelity":
            report = runner.run_fidelity(_require_run_config(_load_config(args)))
        elif args.command == "sweep":
            cfg = _load_config(args)
            if not isinstance(cfg, SweepConfig):
                raise ConfigError("sweep: config must contain a `sweep` object")
            report = runner.run_sweep(cfg)
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
        summary = {k: report[k] for k in ("out_dir", "config_sha256") if k in report}
        json.dump(summary, sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (IOFormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SpinBatteryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
