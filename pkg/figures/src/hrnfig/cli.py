"""Command line front end: one render per invocation."""

from __future__ import annotations

import argparse
import sys

from .render import FigureJob, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrnfig",
        description="Render sweep CSVs as surface or line figures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    job = sub.add_parser("render", help="render one CSV to one image")
    job.add_argument("--in", dest="input_csv", required=True, help="sweep CSV to read")
    job.add_argument("--kind", required=True, choices=("surface", "lines"),
                     help="surface: value over (d_ab_m, d_ri_m) per m; lines: one series per scheme")
    job.add_argument("--out", dest="output_path", required=True,
                     help="image path; extension picks the format (svg/pdf vector, png raster)")
    job.add_argument("--dpi", type=int, default=None, help="raster resolution (png exports)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = FigureJob(
        input_csv=args.input_csv,
        kind=args.kind,
        output_path=args.output_path,
        dpi=args.dpi,
    )
    try:
        info = render(job)
    except SchemaError as err:
        print(f"error: {args.input_csv}: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if info.kind == "surface":
        print(f"wrote {info.output_path} ({len(info.surfaces)} surfaces)")
    else:
        print(f"wrote {info.output_path} ({len(info.series)} series over {info.x_axis})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
