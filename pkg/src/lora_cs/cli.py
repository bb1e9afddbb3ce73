"""Command line entry point: ``lora-cs <experiment> [--config FILE] [overrides]``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import yaml

from .harness import KINDS, ConfigError, ExperimentConfig, render_csv, run

EXIT_CONFIG = 2


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a YAML (or JSON, which YAML accepts) mapping."""
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lora-cs", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", help="YAML/JSON experiment config")
        p.add_argument("--sf", help="comma-separated spreading factors")
        p.add_argument("--snr", help="comma-separated SNRs in dB ('inf' allowed)")
        p.add_argument("--ratio", help="comma-separated M/N values, or 'table'/'formula'")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int, dest="master_seed")
        p.add_argument("--out", help="CSV output path (default: stdout)")
        p.add_argument("--trace", help="optional per-trial trace CSV")
        p.add_argument("--workers", type=int)
        p.add_argument("--solver", choices=["omp", "fista"])
        if kind == "ser-grid":
            p.add_argument("--cross-check", dest="cross_check", action="store_true", default=None,
                           help="also decode with the other solver and report agreement")
        sync = p.add_mutually_exclusive_group()
        sync.add_argument("--sync", dest="sync", action="store_true", default=None)
        sync.add_argument("--unsync", dest="sync", action="store_false")
        if kind == "joint":
            p.add_argument("--gateways", type=int)
            p.add_argument("--offsets", dest="gateway_offsets_db", help="per-gateway SNR offsets in dB")
            p.add_argument("--schemes", help="comma-separated weighting schemes")
            p.add_argument("--snr-mode", dest="snr_mode", choices=["oracle", "estimate"])
            p.add_argument("--fusion-profile", dest="fusion_profile", choices=["refit", "solver"])
        if kind == "bandwidth":
            p.add_argument("--channels", type=int)
            p.add_argument("--bits", type=int)
            p.add_argument("--rate", type=float, dest="sample_rate")
            p.add_argument("--alpha", help="comma-separated compression ratios")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data: dict[str, Any] = {}
    if args.config:
        data.update(load_config_file(args.config))
    if data.get("kind", args.kind) != args.kind:
        raise ConfigError(f"config is for {data['kind']!r}, not {args.kind!r}")
    data["kind"] = args.kind
    skip = {"config", "kind", "verbose"}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        if key == "schemes":
            value = [s.strip() for s in value.split(",")]
        data[key] = value
    return ExperimentConfig.from_mapping(data)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except (ConfigError, TypeError) as exc:
        print(f"lora-cs: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rows = run(cfg)
    except ConfigError as exc:
        print(f"lora-cs: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not cfg.out:
        sys.stdout.write(render_csv(rows, cfg))
    return 0


if __name__ == "__main__":
    sys.exit(main())
