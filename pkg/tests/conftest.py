"""Shared fixtures: tiny CSV writers and synthetic series builders."""

from datetime import date, timedelta

import numpy as np
import pytest

START = date(2021, 1, 1)


def day(i: int) -> date:
    return START + timedelta(days=i)


def write_price_csv(path, closes, start=START, header="date,close"):
    lines = [header]
    for i, c in enumerate(closes):
        lines.append(f"{(start + timedelta(days=i)).isoformat()},{c}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_sentiment_csv(path, scores, start=START, header="date,score"):
    lines = [header]
    for i, s in enumerate(scores):
        lines.append(f"{(start + timedelta(days=i)).isoformat()},{s}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def make_prices(closes, start=START):
    from cryptocast.prices import PricePoint, PriceSeries

    return PriceSeries(tuple(PricePoint(start + timedelta(days=i), float(c)) for i, c in enumerate(closes)))


def make_sentiment(scores, start=START):
    from cryptocast.sentiment import SentimentPoint, SentimentSeries

    return SentimentSeries(tuple(SentimentPoint(start + timedelta(days=i), float(s)) for i, s in enumerate(scores)))


def sinusoid(count, period=25.0, level=100.0, amplitude=20.0):
    t = np.arange(count, dtype=np.float64)
    return level + amplitude * np.sin(2.0 * np.pi * t / period)


@pytest.fixture
def price_csv(tmp_path):
    def _write(closes, **kw):
        return write_price_csv(tmp_path / "prices.csv", closes, **kw)

    return _write


@pytest.fixture
def sentiment_csv(tmp_path):
    def _write(scores, **kw):
        return write_sentiment_csv(tmp_path / "sentiment.csv", scores, **kw)

    return _write
