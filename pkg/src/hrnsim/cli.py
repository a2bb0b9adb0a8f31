"""Command line front end for the bundled sweeps.

Each subcommand runs one study and writes its delimited output. fig3/fig4
are closed-form gain maps; fig5/fig6 evaluate the full scheme set and
accept swarm-budget overrides when a quick look is enough.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .experiments import (
    SweepValidationError,
    load_config,
    run_custom,
    write_csv,
    _PRESET_SPECS,
)

_PRESET_HELP = {
    "fig3": "hop-gain surfaces over the placement grid (two surface sizes)",
    "fig4": "hybrid gain improvement over the best single-technology deployment",
    "fig5": "rate vs transmit power for the decode-and-forward scheme family",
    "fig6": "rate vs surface size for the amplify-and-forward scheme family",
}


def _add_common_options(sub: argparse.ArgumentParser, default_out: str) -> None:
    sub.add_argument("--out", default=default_out, help=f"output CSV path (default {default_out})")
    sub.add_argument("--seed", type=int, default=None, help="master seed override")
    sub.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    sub.add_argument("--particles", type=int, default=None, help="swarm size override")
    sub.add_argument("--iters", type=int, default=None, help="swarm iteration override")
    sub.add_argument("--vclamp", type=float, default=None,
                     help="per-dimension velocity clamp override, radians")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrnsim",
        description="Deterministic link-level sweeps for relay, surface, and hybrid schemes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in _PRESET_HELP.items():
        preset = sub.add_parser(name, help=text)
        _add_common_options(preset, f"{name}.csv")
    custom = sub.add_parser("sweep", help="run a sweep described by a YAML config")
    custom.add_argument("--config", required=True, help="path to the sweep config")
    _add_common_options(custom, "sweep.csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            spec = load_config(args.config)
        else:
            spec = _PRESET_SPECS[args.command]()
        if args.seed is not None:
            spec.master_seed = args.seed
        overrides = {}
        if args.particles is not None:
            overrides["particle_count"] = args.particles
        if args.iters is not None:
            overrides["iteration_count"] = args.iters
        if args.vclamp is not None:
            overrides["velocity_clamp"] = args.vclamp
        if overrides:
            spec.pso = replace(spec.pso, **overrides)
        result = run_custom(spec, jobs=max(1, args.jobs))
    except (SweepValidationError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    write_csv(result, args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
