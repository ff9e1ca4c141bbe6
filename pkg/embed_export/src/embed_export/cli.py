"""embed-export command line: run pretrained extractors, write EMB1 files."""

from __future__ import annotations

import argparse
import sys

from .export import export
from .models import WeightsUnavailable
from .registry import load_registry


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="embed-export", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="embed an image directory into an EMB1 file")
    p.add_argument("--model", required=True, help="model id from the registry")
    p.add_argument("--images", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--registry", action="append", default=[], help="extra registry JSON file(s)")

    p = sub.add_parser("list-models", help="print the registry")
    p.add_argument("--registry", action="append", default=[])

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0

    table = load_registry(args.registry)
    if args.command == "list-models":
        for mid, spec in sorted(table.items()):
            print(f"{mid}\t{spec.family}\tdim={spec.dim}")
        return 0

    if args.model not in table:
        print(f"error: unknown model {args.model!r}; try list-models", file=sys.stderr)
        return 1
    try:
        manifest = export(table[args.model], args.images, args.out, batch=args.batch)
    except WeightsUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{manifest['record_count']} records -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
