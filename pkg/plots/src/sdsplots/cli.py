"""Batch figure rendering: sdsplots render --spec FILE [FILE ...]."""

import argparse
import sys

from .datasets import SchemaMismatch
from .figures import FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sdsplots")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render")
    p.add_argument("--spec", nargs="+", required=True, help="figure spec JSON file(s)")
    args = parser.parse_args(argv)
    status = 0
    for spec_path in args.spec:
        try:
            out = render(FigureSpec.from_json(spec_path))
            print(out)
        except (SchemaMismatch, ValueError, OSError, KeyError) as exc:
            print(f"{spec_path}: {exc}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
