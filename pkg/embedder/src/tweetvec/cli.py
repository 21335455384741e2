"""Command line: dataset in, RGBE embedding file out."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .embed import DEFAULT_MODEL, embed_dataset


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tweetvec",
        description="Embed tweets with a pretrained transformer's pooler output "
        "and write the RGBE file consumed by the bot classifier.",
    )
    parser.add_argument("--dataset", required=True, help="dataset path")
    parser.add_argument("--format", default="jsonl",
                        choices=("jsonl", "cresci-csv", "pan-xml-dir"))
    parser.add_argument("--out", required=True, help="output RGBE path")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="checkpoint name or local directory")
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--max-tokens", type=int, default=None,
                        help="token truncation limit (default: model maximum)")
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        report = embed_dataset(
            args.dataset,
            args.format,
            args.out,
            model_name=args.model,
            batch_size=args.batch_size,
            max_tokens=args.max_tokens,
            device=args.device,
        )
    except (OSError, ValueError) as exc:
        print(f"tweetvec: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(report.__dict__, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
