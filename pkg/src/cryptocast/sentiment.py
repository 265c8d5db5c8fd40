"""Daily sentiment scores: CSV loading, label mapping, and price alignment."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from datetime import date

import numpy as np

from cryptocast.prices import PriceSeries

log = logging.getLogger(__name__)

VALID_LABELS = ("positive", "negative", "neutral")


class SentimentDataError(ValueError):
    """Malformed or inconsistent sentiment data."""


@dataclass(frozen=True)
class SentimentPoint:
    """One daily aggregate sentiment score in [-1, 1]."""

    day: date
    score: float

    def __post_init__(self) -> None:
        if not isinstance(self.day, date):
            raise SentimentDataError(f"day must be a datetime.date, got {type(self.day).__name__}")
        if not (isinstance(self.score, (int, float)) and math.isfinite(self.score)):
            raise SentimentDataError(f"score must be finite, got {self.score!r} for {self.day}")
        if not -1.0 <= self.score <= 1.0:
            raise SentimentDataError(f"score must be in [-1, 1], got {self.score} for {self.day}")


@dataclass(frozen=True)
class SentimentSeries:
    """Possibly empty run of daily scores with strictly increasing dates."""

    points: tuple[SentimentPoint, ...]

    def __post_init__(self) -> None:
        for prev, cur in zip(self.points, self.points[1:]):
            if cur.day <= prev.day:
                raise SentimentDataError(
                    f"dates must be strictly increasing, got {prev.day} then {cur.day}"
                )

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def by_date(self) -> dict[date, float]:
        return {p.day: p.score for p in self.points}


@dataclass(frozen=True)
class AlignedSeries:
    """Closes and sentiment scores on one shared date axis."""

    dates: tuple[date, ...]
    closes: np.ndarray
    scores: np.ndarray

    def __post_init__(self) -> None:
        if not (len(self.dates) == len(self.closes) == len(self.scores)):
            raise SentimentDataError(
                f"aligned lengths differ: {len(self.dates)} dates, "
                f"{len(self.closes)} closes, {len(self.scores)} scores"
            )

    def __len__(self) -> int:
        return len(self.dates)


def load_sentiment_series(path) -> SentimentSeries:
    """Read a sentiment CSV with header columns date,score.

    Dates must be ISO YYYY-MM-DD, strictly increasing; scores must lie
    in [-1, 1]. A file with only the header yields an empty series.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SentimentDataError(f"cannot read sentiment file {path}: {exc}") from exc
    if not rows:
        raise SentimentDataError(f"sentiment file {path} is empty")

    header = [col.strip().lower() for col in rows[0]]
    if "date" not in header or "score" not in header:
        raise SentimentDataError(
            f"sentiment file {path} must have 'date' and 'score' columns, got header {rows[0]}"
        )
    date_col = header.index("date")
    score_col = header.index("score")

    points = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) <= max(date_col, score_col):
            raise SentimentDataError(f"{path}:{lineno}: expected at least {max(date_col, score_col) + 1} columns")
        try:
            day = date.fromisoformat(row[date_col].strip())
        except ValueError as exc:
            raise SentimentDataError(f"{path}:{lineno}: bad date {row[date_col]!r}: {exc}") from exc
        try:
            score = float(row[score_col])
        except ValueError as exc:
            raise SentimentDataError(f"{path}:{lineno}: bad score {row[score_col]!r}") from exc
        try:
            points.append(SentimentPoint(day, score))
        except SentimentDataError as exc:
            raise SentimentDataError(f"{path}:{lineno}: {exc}") from exc

    for prev, cur in zip(points, points[1:]):
        if cur.day <= prev.day:
            raise SentimentDataError(
                f"{path}: dates must be strictly increasing, got {prev.day} then {cur.day}"
            )
    return SentimentSeries(tuple(points))


def label_to_score(label: str, confidence: float) -> float:
    """Map a classifier label and confidence to a signed daily score.

    positive -> +confidence, negative -> -confidence, neutral -> 0.0.
    Confidence must lie in [0, 1].
    """
    if not (isinstance(confidence, (int, float)) and math.isfinite(confidence)):
        raise SentimentDataError(f"confidence must be finite, got {confidence!r}")
    if not 0.0 <= confidence <= 1.0:
        raise SentimentDataError(f"confidence must be in [0, 1], got {confidence}")
    key = label.strip().lower()
    if key not in VALID_LABELS:
        raise SentimentDataError(f"unknown label {label!r}, expected one of {VALID_LABELS}")
    if key == "positive":
        return float(confidence)
    if key == "negative":
        return -float(confidence)
    return 0.0


def align(prices: PriceSeries, sentiment: SentimentSeries, missing_policy: str = "neutral_fill") -> AlignedSeries:
    """Join a price series with sentiment scores on the price dates.

    missing_policy: "neutral_fill" substitutes 0.0 for price dates with
    no score (logged), "error" raises instead. Sentiment dates with no
    matching price date are ignored with a log note.
    """
    if missing_policy not in ("neutral_fill", "error"):
        raise SentimentDataError(f"unknown missing_policy {missing_policy!r}")
    if len(sentiment) == 0:
        raise SentimentDataError("sentiment series is empty; nothing to align")

    lookup = sentiment.by_date()
    price_dates = prices.dates()
    missing = [d for d in price_dates if d not in lookup]
    if missing:
        if missing_policy == "error":
            shown = ", ".join(str(d) for d in missing[:5])
            raise SentimentDataError(
                f"{len(missing)} price date(s) lack sentiment scores (first: {shown})"
            )
        log.warning("filling %d missing sentiment day(s) with neutral 0.0", len(missing))

    extra = len(sentiment) - sum(1 for d in price_dates if d in lookup)
    if extra > 0:
        log.info("ignoring %d sentiment day(s) outside the price date range", extra)

    scores = np.array([lookup.get(d, 0.0) for d in price_dates], dtype=np.float64)
    return AlignedSeries(dates=price_dates, closes=prices.closes(), scores=scores)
