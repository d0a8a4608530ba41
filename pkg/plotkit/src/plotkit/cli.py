"""plotkit <figure-kind> <inputs> -o out.svg"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, render
from .schema import SchemaError


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plotkit", description=__doc__)
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("inputs", nargs="+", help="CSV or binary-grid files")
    ap.add_argument("-o", "--out", required=True, help="output .svg or .png")
    ap.add_argument("--reference", type=float, default=None,
                    help="horizontal reference line (e.g. the 1D limit)")
    ap.add_argument("--linear-x", action="store_true")
    ap.add_argument("--title", default="")
    ap.add_argument("--target-radius", type=float, default=1.0)
    ap.add_argument("--quiver-step", type=int, default=8)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(kind=args.kind, inputs=args.inputs,
                      log_x=not args.linear_x, reference=args.reference,
                      title=args.title, target_radius=args.target_radius,
                      quiver_step=args.quiver_step)
    try:
        path = render(spec, args.out)
    except (SchemaError, OSError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
