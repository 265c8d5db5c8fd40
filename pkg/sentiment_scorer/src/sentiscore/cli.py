"""Command line: news file in, sentiment CSV out."""

from __future__ import annotations

import argparse
import sys

from sentiscore.lexicon import MODEL_ID as DEFAULT_MODEL
from sentiscore.news import NewsError, load_news, merge_daily_news
from sentiscore.scoring import ScoringError, emit_scores, get_backend, score_bundles


def cmd_score(args) -> int:
    backend = get_backend(args.model)
    items = load_news(args.src, fmt=args.format)
    bundles = merge_daily_news(items)
    scored = score_bundles(bundles, backend)
    emit_scores(scored, args.out)
    if scored:
        print(
            f"scored {len(scored)} day(s) with {backend.model_id}, "
            f"{scored[0].day} to {scored[-1].day}; wrote {args.out}"
        )
    else:
        print(f"scored 0 day(s) with {backend.model_id}; wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sentiscore",
        description="score dated news text into a date,score sentiment CSV",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score a news file into a sentiment CSV")
    p_score.add_argument("--in", dest="src", required=True, metavar="FILE",
                         help="news input (CSV with date,text or JSON lines)")
    p_score.add_argument("--out", required=True, metavar="FILE", help="sentiment CSV to write")
    p_score.add_argument("--model", default=DEFAULT_MODEL, metavar="ID",
                         help=f"classifier id (default {DEFAULT_MODEL})")
    p_score.add_argument("--format", choices=("auto", "csv", "jsonl"), default="auto",
                         help="input layout (default: by file extension)")
    p_score.set_defaults(func=cmd_score)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NewsError, ScoringError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
