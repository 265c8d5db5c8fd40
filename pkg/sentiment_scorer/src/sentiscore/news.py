"""Dated news ingest: load date,text records and merge them per day.

Input is either a CSV with a date,text header or JSON lines with
"date" and "text" keys, one object per line. Items from the same
calendar day are concatenated (input order, newline separator) into a
single bundle, one bundle per day, so the downstream classifier sees
everything written about that day at once.
"""

from __future__ import annotations

import csv
import datetime
import json
import logging
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

SEPARATOR = "\n"


class NewsError(ValueError):
    """Malformed news input."""


@dataclass(frozen=True)
class NewsItem:
    """One dated piece of news text (headline or article body)."""

    day: datetime.date
    text: str

    def __post_init__(self) -> None:
        if not isinstance(self.day, datetime.date):
            raise NewsError(f"day must be a datetime.date, got {type(self.day).__name__}")
        if not isinstance(self.text, str) or not self.text.strip():
            raise NewsError(f"text must be a non-empty string, got {self.text!r} for {self.day}")


@dataclass(frozen=True)
class DailyBundle:
    """All of one day's news texts joined into a single classifier input."""

    day: datetime.date
    merged_text: str

    def __post_init__(self) -> None:
        if not isinstance(self.day, datetime.date):
            raise NewsError(f"day must be a datetime.date, got {type(self.day).__name__}")
        if not isinstance(self.merged_text, str) or not self.merged_text.strip():
            raise NewsError(f"merged_text must be non-empty for {self.day}")


def merge_daily_news(items) -> tuple[DailyBundle, ...]:
    """Group items by day into date-sorted bundles.

    Texts from the same day are joined in input order with a newline.
    Empty input yields an empty tuple.
    """
    by_day: dict[datetime.date, list[str]] = {}
    for item in items:
        if not isinstance(item, NewsItem):
            raise NewsError(f"expected NewsItem, got {type(item).__name__}")
        by_day.setdefault(item.day, []).append(item.text)
    return tuple(
        DailyBundle(day, SEPARATOR.join(texts)) for day, texts in sorted(by_day.items())
    )


def _parse_date(raw: str):
    return datetime.date.fromisoformat(raw.strip())


def _load_csv(path) -> tuple[NewsItem, ...]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise NewsError(f"cannot read news file {path}: {exc}") from exc
    if not rows:
        raise NewsError(f"news file {path} is empty")
    header = [cell.strip().lower() for cell in rows[0]]
    if "date" not in header or "text" not in header:
        raise NewsError(f"{path}: expected a date,text header, got {rows[0]!r}")
    date_col = header.index("date")
    text_col = header.index("text")
    items = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) <= max(date_col, text_col):
            raise NewsError(f"{path}:{lineno}: expected at least {max(date_col, text_col) + 1} columns")
        try:
            day = _parse_date(row[date_col])
        except ValueError as exc:
            raise NewsError(f"{path}:{lineno}: bad date {row[date_col]!r}: {exc}") from exc
        try:
            items.append(NewsItem(day, row[text_col]))
        except NewsError as exc:
            raise NewsError(f"{path}:{lineno}: {exc}") from exc
    return tuple(items)


def _load_jsonl(path) -> tuple[NewsItem, ...]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise NewsError(f"cannot read news file {path}: {exc}") from exc
    items = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise NewsError(f"{path}:{lineno}: bad JSON: {exc}") from exc
        if not isinstance(obj, dict) or "date" not in obj or "text" not in obj:
            raise NewsError(f"{path}:{lineno}: expected an object with date and text keys")
        try:
            day = _parse_date(str(obj["date"]))
        except ValueError as exc:
            raise NewsError(f"{path}:{lineno}: bad date {obj['date']!r}: {exc}") from exc
        try:
            items.append(NewsItem(day, obj["text"] if isinstance(obj["text"], str) else repr(obj["text"])))
        except NewsError as exc:
            raise NewsError(f"{path}:{lineno}: {exc}") from exc
    return tuple(items)


def load_news(path, fmt: str = "auto") -> tuple[NewsItem, ...]:
    """Read news items from a CSV or JSON-lines file.

    fmt "auto" picks by extension (.jsonl / .ndjson are JSON lines,
    anything else is CSV); "csv" and "jsonl" force a reader.
    """
    if fmt not in ("auto", "csv", "jsonl"):
        raise NewsError(f"unknown format {fmt!r}, expected auto, csv, or jsonl")
    if fmt == "auto":
        fmt = "jsonl" if Path(path).suffix.lower() in (".jsonl", ".ndjson") else "csv"
    items = _load_jsonl(path) if fmt == "jsonl" else _load_csv(path)
    if not items:
        log.warning("news file %s has no data rows", path)
    return items
