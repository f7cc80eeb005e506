"""aloha-plot command line entry point.

Exit codes: 0 success, 2 spec error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from .plotter import PlotSpecError, load_spec, plot_ccdf


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="aloha-plot",
        description="Render a log-log CCDF figure from a JSON plot spec",
    )
    parser.add_argument("--spec", required=True, help="path to a plotspec.json")
    args = parser.parse_args(argv)
    try:
        image, sidecar = plot_ccdf(load_spec(args.spec))
    except PlotSpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {image} (sidecar {sidecar})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
