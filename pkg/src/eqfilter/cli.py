"""Command line entry point: ``eqfilter run | verify | sweep-precision``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import certify
from .errors import ConfigError, NonFiniteState
from .scenario import ScenarioConfig, default_scenario, load_config, with_overrides
from .sim import emit_plot_script, run, sweep_precision, write_csv


def _add_scenario_flags(parser, default_precision=None):
    parser.add_argument("--config", type=Path, help="JSON scenario file")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    parser.add_argument("--seed", type=int, help="landmark seed")
    parser.add_argument(
        "--precision", choices=("single", "double"), default=default_precision
    )
    parser.add_argument("--duration", type=float, help="seconds")
    parser.add_argument("--dt", type=float, help="integration step, seconds")
    parser.add_argument("--noise-std", type=float, help="measurement noise, meters")


def _scenario(args) -> ScenarioConfig:
    config = load_config(args.config) if args.config else default_scenario()
    overrides = {
        "landmark_seed": args.seed,
        "precision": args.precision,
        "duration": args.duration,
        "dt": args.dt,
        "noise_std": args.noise_std,
    }
    return with_overrides(config, **overrides)


def _cmd_run(args) -> int:
    config = _scenario(args)
    record = run(config)
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(record, args.out / "run.csv")
    emit_plot_script(record, args.out / "plot.gp", csv_path.name)
    print(f"wrote {csv_path} ({len(record.times)} rows, {record.n_filters} filters)")
    for i in range(record.n_filters):
        print(
            f"filter {i + 1}: final position error {record.pos_err[i, -1]:.3e} m, "
            f"angle error {record.ang_err[i, -1]:.3e} rad"
        )
    return 0


def _cmd_verify(args) -> int:
    checks = certify.run_all(args.seed)
    for check in checks:
        print(check.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} suites passed")
    return 1 if failed else 0


def _cmd_sweep(args) -> int:
    config = _scenario(args)
    precision = config.precision if args.precision else "single"
    study = sweep_precision(config, precision)
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(study.record, args.out / f"sweep_{precision}.csv")
    emit_plot_script(study.record, args.out / "sweep.gp", f"sweep_{precision}.csv")
    write_csv(study.reference, args.out / "reference_double.csv")
    print(f"{precision} precision, deviation from double identity-origin reference")
    for origin, dev, ang in zip(
        study.origins, study.mean_deviation, study.angle_deviation.mean(axis=1)
    ):
        print(
            f"origin ({float(origin.theta):g}, {origin.x[0]:g}, {origin.x[1]:g}): "
            f"mean position deviation {dev:.3e} m, mean angle deviation {ang:.3e} rad"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqfilter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario and write CSV")
    _add_scenario_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="print the residual table")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=_cmd_verify)

    p_sweep = sub.add_parser("sweep-precision", help="origin-distance precision study")
    _add_scenario_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(over="ignore", invalid="ignore")
    try:
        return args.func(args)
    except (ConfigError, NonFiniteState, OSError) as exc:
        print(f"eqfilter: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
