"""Daily closing-price series: CSV loading, min-max scaling, and data splits."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from datetime import date

import numpy as np

log = logging.getLogger(__name__)


class PriceDataError(ValueError):
    """Malformed or inconsistent price data."""


@dataclass(frozen=True)
class PricePoint:
    """One daily observation: calendar date and positive closing price."""

    day: date
    close: float

    def __post_init__(self) -> None:
        if not isinstance(self.day, date):
            raise PriceDataError(f"day must be a datetime.date, got {type(self.day).__name__}")
        if not (isinstance(self.close, (int, float)) and math.isfinite(self.close)):
            raise PriceDataError(f"close must be finite, got {self.close!r} for {self.day}")
        if self.close <= 0:
            raise PriceDataError(f"close must be positive, got {self.close} for {self.day}")


@dataclass(frozen=True)
class PriceSeries:
    """Non-empty run of daily prices with strictly increasing dates."""

    points: tuple[PricePoint, ...]

    def __post_init__(self) -> None:
        if len(self.points) == 0:
            raise PriceDataError("price series must contain at least one point")
        for prev, cur in zip(self.points, self.points[1:]):
            if cur.day <= prev.day:
                raise PriceDataError(
                    f"dates must be strictly increasing, got {prev.day} then {cur.day}"
                )

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def closes(self) -> np.ndarray:
        return np.array([p.close for p in self.points], dtype=np.float64)

    def dates(self) -> tuple[date, ...]:
        return tuple(p.day for p in self.points)

    def segment(self, start: int, stop: int) -> "PriceSeries":
        """Contiguous sub-series over [start, stop)."""
        return PriceSeries(self.points[start:stop])


@dataclass(frozen=True)
class NormalizationParams:
    """Min-max scaling bounds fitted on a training segment."""

    minimum: float
    maximum: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.minimum) and math.isfinite(self.maximum)):
            raise PriceDataError("normalization bounds must be finite")
        if not self.maximum > self.minimum:
            raise PriceDataError(
                f"degenerate normalization range: min={self.minimum}, max={self.maximum}"
            )


@dataclass(frozen=True)
class SplitResult:
    """Chronological partition of a series. validation is None for simple splits."""

    subtrain: PriceSeries
    validation: PriceSeries | None
    test: PriceSeries


def load_price_series(path) -> PriceSeries:
    """Read a daily close CSV with header columns date,close.

    Dates must be ISO YYYY-MM-DD, strictly increasing; closes must be
    positive decimals. Extra columns are ignored. Calendar gaps are
    tolerated but logged.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise PriceDataError(f"cannot read price file {path}: {exc}") from exc
    if not rows:
        raise PriceDataError(f"price file {path} is empty")

    header = [col.strip().lower() for col in rows[0]]
    if "date" not in header or "close" not in header:
        raise PriceDataError(
            f"price file {path} must have 'date' and 'close' columns, got header {rows[0]}"
        )
    date_col = header.index("date")
    close_col = header.index("close")

    points = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) <= max(date_col, close_col):
            raise PriceDataError(f"{path}:{lineno}: expected at least {max(date_col, close_col) + 1} columns")
        try:
            day = date.fromisoformat(row[date_col].strip())
        except ValueError as exc:
            raise PriceDataError(f"{path}:{lineno}: bad date {row[date_col]!r}: {exc}") from exc
        try:
            close = float(row[close_col])
        except ValueError as exc:
            raise PriceDataError(f"{path}:{lineno}: bad close {row[close_col]!r}") from exc
        try:
            points.append(PricePoint(day, close))
        except PriceDataError as exc:
            raise PriceDataError(f"{path}:{lineno}: {exc}") from exc

    if not points:
        raise PriceDataError(f"price file {path} contains no data rows")
    for prev, cur in zip(points, points[1:]):
        if cur.day <= prev.day:
            raise PriceDataError(
                f"{path}: dates must be strictly increasing, got {prev.day} then {cur.day}"
            )

    gap_days = (points[-1].day - points[0].day).days + 1 - len(points)
    if gap_days > 0:
        log.warning("price file %s has %d missing calendar day(s)", path, gap_days)
    return PriceSeries(tuple(points))


def fit_normalizer(series: PriceSeries) -> NormalizationParams:
    """Fit min-max bounds on a series of at least two points."""
    if len(series) < 2:
        raise PriceDataError("normalizer needs at least two points")
    closes = series.closes()
    return NormalizationParams(minimum=float(closes.min()), maximum=float(closes.max()))


def normalize(values, params: NormalizationParams) -> np.ndarray:
    """Scale values to (v - min) / (max - min). Out-of-range inputs may map outside [0, 1]."""
    arr = np.asarray(values, dtype=np.float64)
    return (arr - params.minimum) / (params.maximum - params.minimum)


def denormalize(values, params: NormalizationParams) -> np.ndarray:
    """Invert normalize: v * (max - min) + min."""
    arr = np.asarray(values, dtype=np.float64)
    return arr * (params.maximum - params.minimum) + params.minimum


def split_sizes(total: int, outer_frac: float, inner_frac: float | None = None):
    """Segment lengths for a chronological split.

    With inner_frac: (subtrain, validation, test) where
    train = floor(outer_frac * total), test = total - train,
    subtrain = floor(inner_frac * train), validation = train - subtrain.
    Without inner_frac: (train, test).
    """
    if not 0.0 < outer_frac < 1.0:
        raise PriceDataError(f"outer fraction must be in (0, 1), got {outer_frac}")
    train_n = math.floor(outer_frac * total)
    test_n = total - train_n
    if inner_frac is None:
        return train_n, test_n
    if not 0.0 < inner_frac < 1.0:
        raise PriceDataError(f"inner fraction must be in (0, 1), got {inner_frac}")
    sub_n = math.floor(inner_frac * train_n)
    val_n = train_n - sub_n
    return sub_n, val_n, test_n


def split_hierarchical(series: PriceSeries, outer_frac: float = 0.85, inner_frac: float = 0.85) -> SplitResult:
    """Chronological subtrain/validation/test split.

    train = floor(outer_frac * len), test = remainder; within train,
    subtrain = floor(inner_frac * train) and validation = remainder.
    Every segment must be non-empty.
    """
    sub_n, val_n, test_n = split_sizes(len(series), outer_frac, inner_frac)
    if sub_n == 0 or val_n == 0 or test_n == 0:
        raise PriceDataError(
            f"split produces an empty segment: subtrain={sub_n}, validation={val_n}, test={test_n}"
        )
    return SplitResult(
        subtrain=series.segment(0, sub_n),
        validation=series.segment(sub_n, sub_n + val_n),
        test=series.segment(sub_n + val_n, len(series)),
    )


def split_simple(series: PriceSeries, train_frac: float = 0.85) -> SplitResult:
    """Chronological train/test split with no validation segment."""
    train_n, test_n = split_sizes(len(series), train_frac)
    if train_n == 0 or test_n == 0:
        raise PriceDataError(f"split produces an empty segment: train={train_n}, test={test_n}")
    return SplitResult(
        subtrain=series.segment(0, train_n),
        validation=None,
        test=series.segment(train_n, len(series)),
    )
