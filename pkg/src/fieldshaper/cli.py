"""Command-line front end: one subcommand per scenario kind.

Exit codes: 0 success, 1 validation/config error, 2 solver error.  The
--seed option only affects randomized property sampling in diagnostics;
solver results never depend on it.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import RunConfig, build_mapping, parse_config
from .errors import ConfigError, FieldshaperError, SetupError, SolverError, ValidationError
from .experiments import (
    convergence_study,
    pullback_check,
    rod_transient_error,
    run_bender_experiment,
    run_cloak_experiment,
    sinh_benchmark_error,
)
from .output import emit_outputs, write_report_json


def _load_config(args, scenario: str) -> RunConfig:
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    else:
        text = '{"scenario": "%s"}' % scenario
    cfg = parse_config(text)
    if cfg.scenario != scenario:
        raise ConfigError(
            f"key 'scenario': config says {cfg.scenario!r} but the "
            f"{scenario!r} subcommand was invoked"
        )
    return cfg


def _run_cloak(args) -> int:
    cfg = _load_config(args, "cloak")
    variants = tuple(cfg.raw.get("variants", ("original", "blanket", "cloaked")))
    report = run_cloak_experiment(cfg.payload, variants)
    report.provenance["config_echo"] = cfg.raw
    report.provenance["seed"] = args.seed
    emit_outputs(args.out, report.mesh, report.solutions, report.to_dict(), prefix="cloak")
    print(f"cloak experiment written to {args.out}")
    return 0


def _run_bender(args) -> int:
    cfg = _load_config(args, "bender")
    variants = tuple(
        cfg.raw.get("variants", ("homogeneous-arc", "eq8-derived", "eq11-paper"))
    )
    report = run_bender_experiment(cfg.payload, variants)
    report.provenance["config_echo"] = cfg.raw
    report.provenance["seed"] = args.seed
    emit_outputs(args.out, report.mesh, report.solutions, report.to_dict(), prefix="bender")
    print(f"bender experiment written to {args.out}")
    return 0


def _run_pullback(args) -> int:
    cfg = _load_config(args, "pullback")
    p = cfg.payload
    mapping = build_mapping(p["map"], p["map_params"])
    study = convergence_study(
        lambda n: pullback_check(mapping, n=n, beta=p["beta"]), p["grids"]
    )
    report = {
        "scenario": "pullback",
        "metrics": {"mismatch_per_grid": study},
        "provenance": {"config_echo": cfg.raw, "seed": args.seed},
    }
    os.makedirs(args.out, exist_ok=True)
    write_report_json(os.path.join(args.out, "pullback_report.json"), report)
    print(f"pullback study written to {args.out}")
    return 0


def _run_convergence(args) -> int:
    cfg = _load_config(args, "convergence")
    p = cfg.payload
    if p["benchmark"] == "sinh":
        study = convergence_study(sinh_benchmark_error, p["grids"])
    else:  # rod-transient
        study = convergence_study(lambda n: rod_transient_error(n, dt=1e-3), p["grids"])
    report = {
        "scenario": "convergence",
        "metrics": {p["benchmark"]: study},
        "provenance": {"config_echo": cfg.raw, "seed": args.seed},
    }
    os.makedirs(args.out, exist_ok=True)
    write_report_json(os.path.join(args.out, "convergence_report.json"), report)
    print(f"convergence study written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fieldshaper",
        description="Transformation-designed control of 2D diffusion fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, runner in (
        ("cloak", _run_cloak),
        ("bender", _run_bender),
        ("pullback", _run_pullback),
        ("convergence", _run_convergence),
    ):
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", help="JSON config file (defaults apply if omitted)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="seed for diagnostic sampling")
        p.set_defaults(runner=runner)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.runner(args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, SetupError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    except FieldshaperError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
