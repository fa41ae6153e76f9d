"""Bridge CLI: export per-position candidate distributions to JSONL."""

from __future__ import annotations

import argparse
import sys

from .export import ExportConfig, export, iter_sentences
from .models import load_model


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hanzibridge",
        description="Export model candidate distributions into the "
                    "correction interchange format")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", formatter_class=argparse.ArgumentDefaultsHelpFormatter,
                       help="dump per-position distributions for a sentence file")
    p.add_argument("--model", required=True,
                   help="dummy:uniform, dummy:echo, or a HuggingFace model id")
    p.add_argument("--topk", type=int, default=16,
                   help="model candidates kept per position")
    p.add_argument("--neighbors", default=None,
                   help="confusion-set or matrix TSV with similarity neighbors")
    p.add_argument("--in", dest="infile", required=True,
                   help="UTF-8 text file, one sentence per line")
    p.add_argument("--out", required=True, help="output interchange JSONL")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.topk < 1:
        parser.error("--topk must be >= 1")
    try:
        model = load_model(args.model)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: cannot load model {args.model!r}: {exc}", file=sys.stderr)
        return 1
    config = ExportConfig(model=args.model, top_k=args.topk,
                          neighbors_path=args.neighbors)
    try:
        with open(args.out, "w", encoding="utf-8") as out:
            count = export(iter_sentences(args.infile), model, config, out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{count} sentences -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
