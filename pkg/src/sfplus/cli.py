"""Command-line entry point.

Subcommands mirror the library surface: `run` executes one config, `sweep`
a grid of them, `fit`/`predict` fit the inverse-sqrt loss model to a log,
`bound` tabulates a schedule's loss bound, and `presets list` shows the
shipped configurations. Exit codes: 0 success, 2 invalid config, 3
diverged run, 4 unwritable output, 1 anything else.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional

from . import harness
from .errors import ConfigInvalid, Diverged, SfplusError
from .presets import describe_presets

OUT_ENV = "SFPLUS_OUT"


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML config path or preset name")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="dotted-path config override; repeatable",
    )
    p.add_argument("--seed", type=int, help="override the run seed")
    p.add_argument("--out", help=f"output directory (default from config or ${OUT_ENV})")
    p.add_argument("--parallelism", type=int, default=1, help="sweep worker count")
    p.add_argument("--quiet", action="store_true", help="suppress progress lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfplus",
        description="Schedule-free optimizer runs, sweeps, and loss-curve analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one optimization run")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run a config grid")
    _add_common(p_sweep)

    for name, help_text in (
        ("fit", "fit a/sqrt(t+b)+c to a logged loss column"),
        ("predict", "fit, then extrapolate to a required horizon"),
    ):
        p_fit = sub.add_parser(name, help=help_text)
        p_fit.add_argument("log", help="run log CSV to read")
        p_fit.add_argument("--column", default="loss_at_x")
        p_fit.add_argument(
            "--window",
            nargs=2,
            type=float,
            default=(0.25, 1.0),
            metavar=("LO", "HI"),
            help="fit window as fractions of the final step",
        )
        p_fit.add_argument(
            "--horizon",
            type=int,
            required=(name == "predict"),
            help="extend the prediction to this step",
        )
        p_fit.add_argument(
            "--smooth",
            type=float,
            help="EMA coefficient applied to the column before fitting",
        )
        _add_common(p_fit)

    p_bound = sub.add_parser("bound", help="tabulate a schedule's loss bound")
    _add_common(p_bound)

    p_presets = sub.add_parser("presets", help="inspect shipped configurations")
    p_presets.add_argument("action", choices=["list"])
    return parser


def resolve_out(flag: Optional[str], cfg_out: Optional[str], default: str) -> Path:
    """Output dir precedence: --out flag, then $SFPLUS_OUT, then the
    config's own `out`, then a command-specific default."""
    if flag:
        return Path(flag)
    env = os.environ.get(OUT_ENV)
    if env:
        return Path(env)
    if cfg_out:
        return Path(cfg_out)
    return Path(default)


def _cmd_run(args) -> int:
    cfg = harness.load_config(args.config or "default")
    cfg = harness.apply_overrides(cfg, args.overrides)
    if args.seed is not None:
        cfg["seed"] = args.seed
    name = cfg.get("name") or "run"
    out = resolve_out(args.out, cfg.get("out"), f"runs/{name}")
    summary = harness.run(cfg, out, quiet=args.quiet)
    if summary["diverged"]:
        return Diverged.exit_code
    return 0


def _cmd_sweep(args) -> int:
    if not args.config:
        raise ConfigInvalid("sweep requires --config (a sweep YAML or preset name)")
    spec = harness.load_sweep(args.config)
    if args.overrides:
        spec = harness.apply_overrides(spec, args.overrides)
    if args.seed is not None:
        base = spec.get("base")
        if isinstance(base, str):
            from .presets import get_preset

            spec["base"] = base = get_preset(base)
        if isinstance(base, dict):
            base["seed"] = args.seed
    name = spec.get("name") or "sweep"
    out = resolve_out(args.out, None, f"runs/{name}")
    harness.sweep(spec, out, parallelism=args.parallelism, quiet=args.quiet)
    return 0


def _cmd_fit(args) -> int:
    out = resolve_out(args.out, None, "runs/fit")
    harness.fit_cmd(
        args.log,
        out,
        column=args.column,
        window=tuple(args.window),
        horizon=args.horizon,
        smooth=args.smooth,
        quiet=args.quiet,
    )
    return 0


def _cmd_bound(args) -> int:
    cfg = {}
    if args.config:
        if not Path(args.config).is_file():
            raise ConfigInvalid("bound --config must be a YAML file path")
        cfg = harness.load_config(args.config)
    cfg = harness.apply_overrides(cfg, args.overrides)
    out = resolve_out(args.out, None, "runs/bound")
    harness.bound_cmd(cfg, out, quiet=args.quiet)
    return 0


def _cmd_presets(args) -> int:
    for name, kind, summary in describe_presets():
        print(f"{name:<24s} {kind:<6s} {summary}")
    return 0


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command in ("fit", "predict"):
            return _cmd_fit(args)
        if args.command == "bound":
            return _cmd_bound(args)
        if args.command == "presets":
            return _cmd_presets(args)
        parser.error(f"unknown command {args.command!r}")
    except SfplusError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return ex.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
