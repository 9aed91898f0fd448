"""Command line wrapper around render.

Exit codes: 0 success; 2 for usage problems, unreadable or malformed
input; 1 when the output image cannot be written.
"""

import argparse
import sys

from . import PANELS, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotviz",
        description="Render a sweep results CSV into mean-bias and "
                    "variance charts.",
    )
    parser.add_argument("--in", dest="input_csv", required=True,
                        metavar="CSV", help="sweep results CSV")
    parser.add_argument("--out", dest="output_image", required=True,
                        metavar="IMAGE",
                        help="output image; format follows the extension")
    parser.add_argument("--which", choices=PANELS, default="both",
                        help="panels to draw (default: both)")
    parser.add_argument("--log-x", action="store_true",
                        help="logarithmic n axis")
    parser.add_argument("--title", default=None, help="figure title")
    return parser


def main(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    spec = PlotSpec(args.input_csv, args.output_image, args.which,
                    args.log_x, args.title)
    try:
        render(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot write {spec.output_image}: {exc}",
              file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    raise SystemExit(main(sys.argv[1:]))
