"""Command-line entry point: sweeps, steady-state report and self-validation."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from ..gaussian import NonPhysicalStateError
from ..metrology import ModelInconsistencyError
from . import sweeps
from .config import ConfigError, SweepConfig, load_config
from .report import report_steady_state
from .validation import validate

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--lambda-g", type=float, help="gravitational diffusion rate, s^-1")
    common.add_argument("--gamma", type=float, help="damping rate, s^-1")
    common.add_argument("--omega-m", type=float, help="mechanical frequency, s^-1")
    common.add_argument("--n-th", type=float, help="bath occupation")
    common.add_argument("--probe", help="restrict to one named probe")
    common.add_argument("--seed", type=int, help="seed for randomized validation draws")

    parser = argparse.ArgumentParser(
        prog="gravqfi",
        description="Estimation precision of gravitational decoherence with Gaussian probes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("purity-sweep", "purity against time for each probe"),
        ("qfi-sweep", "QFI, homodyne CFI and Cramer-Rao bound against time"),
        ("qfi-contour", "QFI over a (t, lambda_g) grid for one probe"),
        ("steady-state", "report the stationary state and its QFI"),
        ("validate", "run the oracle suites; exit 0 iff all pass"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _resolve_config(args) -> SweepConfig:
    cfg = load_config(args.config) if args.config else SweepConfig()
    cfg = cfg.with_overrides(
        lambda_g=args.lambda_g, gamma=args.gamma, omega_m=args.omega_m, n_th=args.n_th
    )
    if args.out is not None:
        cfg = replace(cfg, output_path=args.out)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.probe is not None:
        probes = cfg.all_probes()
        if args.probe not in probes:
            raise ConfigError(f"unknown probe {args.probe!r}; have {sorted(probes)}", field="probe")
        if args.command == "qfi-contour":
            cfg = replace(cfg, contour_probe=args.probe)
        else:
            cfg = replace(cfg, probes={args.probe: probes[args.probe]}, r_grid=None)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "validate":
            return validate(seed=cfg.seed)
        if args.command == "steady-state":
            sys.stdout.write(report_steady_state(cfg.params))
            return EXIT_OK
        runner = {
            "purity-sweep": sweeps.run_purity_sweep,
            "qfi-sweep": sweeps.run_qfi_sweep,
            "qfi-contour": sweeps.run_qfi_contour,
        }[args.command]
        sweeps.emit(runner(cfg), cfg.output_path)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelInconsistencyError, NonPhysicalStateError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK
