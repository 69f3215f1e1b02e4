"""Command-line interface for the closed-loop simulator.

Subcommands:
  simulate             run a closed-loop experiment, write a CSV log and metrics
  generate-trajectory  propagate the open-loop trajectory generator to CSV
  verify               run a named property-verification suite
  sweep                repeat an experiment over values of one config key

Exit codes: 0 success, 1 configuration error, 2 numerical failure
(singularity or divergence), 3 verification-suite failure.
"""

from __future__ import annotations

import argparse
import copy
import os
import sys
from typing import List, Optional

import numpy as np
import yaml

from .plant_models import DivergenceError, generate_desired_trajectory
from .sim_harness import (
    SUITE_NAMES,
    ConfigError,
    SimConfig,
    compute_metrics,
    metrics_to_text,
    run_closed_loop,
    verify_suite,
)
from .tracking_control import SingularMatrixError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftsmfc",
        description="Finite-time-stable model-free control simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a closed-loop experiment")
    p.add_argument("--config", required=True, help="YAML experiment configuration")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument(
        "--metrics-out",
        help="metrics text file (default: <out> with a .metrics suffix)",
    )

    p = sub.add_parser(
        "generate-trajectory", help="generate the open-loop desired trajectory"
    )
    p.add_argument("--config", required=True, help="YAML experiment configuration")
    p.add_argument("--out", required=True, help="output CSV path (columns t,x_d,theta_d)")

    p = sub.add_parser("verify", help="run a property-verification suite")
    p.add_argument(
        "--suite", required=True, choices=list(SUITE_NAMES) + ["all"],
        help="which suite to run",
    )

    p = sub.add_parser("sweep", help="run an experiment over several parameter values")
    p.add_argument("--config", required=True, help="YAML experiment configuration")
    p.add_argument("--param", required=True, help="dotted config key, e.g. controller.scale")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--out", required=True, help="output directory")
    return parser


def _load_doc(path: str) -> dict:
    try:
        with open(path, "r") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be a mapping")
    return doc


def _cmd_simulate(args) -> int:
    config = SimConfig.from_yaml(args.config)
    log = run_closed_loop(config)
    log.to_csv(args.out)
    metrics_path = args.metrics_out or args.out + ".metrics"
    try:
        metrics = compute_metrics(log, config.settle_time, config.bands)
    except ValueError:
        metrics = {}
    with open(metrics_path, "w") as fh:
        fh.write(metrics_to_text(metrics))
    print(f"wrote {len(log)} records to {args.out}")
    return EXIT_OK


def _cmd_generate_trajectory(args) -> int:
    config = SimConfig.from_yaml(args.config)
    init = (
        config.trajectory_init
        if config.trajectory_init is not None
        else config.initial_state
    )
    samples = generate_desired_trajectory(
        init, config.T, config.dt, config.plant_params
    )
    with open(args.out, "w", newline="\n") as fh:
        fh.write("t,x_d,theta_d\n")
        for k, row in enumerate(samples):
            fh.write(f"{k * config.dt:.17g},{row[0]:.17g},{row[1]:.17g}\n")
    print(f"wrote {len(samples)} samples to {args.out}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    suites = SUITE_NAMES if args.suite == "all" else (args.suite,)
    ok = True
    for name in suites:
        report = verify_suite(name)
        print(report.format())
        ok = ok and report.passed
    return EXIT_OK if ok else EXIT_VERIFY


def _set_dotted(doc: dict, key: str, value) -> None:
    parts = key.split(".")
    node = doc
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"config key {key!r}: {part!r} is not a mapping")
    node[parts[-1]] = value


def _parse_value(text: str):
    return yaml.safe_load(text)


def _cmd_sweep(args) -> int:
    base = _load_doc(args.config)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values must list at least one value")
    os.makedirs(args.out, exist_ok=True)
    for i, text in enumerate(values):
        doc = copy.deepcopy(base)
        _set_dotted(doc, args.param, _parse_value(text))
        config = SimConfig.from_dict(doc)
        log = run_closed_loop(config)
        safe = text.replace("/", "_")
        out_csv = os.path.join(args.out, f"run_{i:03d}_{safe}.csv")
        log.to_csv(out_csv)
        try:
            metrics = compute_metrics(log, config.settle_time, config.bands)
        except ValueError:
            metrics = {}
        with open(out_csv + ".metrics", "w") as fh:
            fh.write(f"# {args.param} = {text}\n")
            fh.write(metrics_to_text(metrics))
        print(f"{args.param}={text}: wrote {out_csv}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "generate-trajectory": _cmd_generate_trajectory,
        "verify": _cmd_verify,
        "sweep": _cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, SingularMatrixError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
