"""Sentiment CSV loading, label mapping, and price-date alignment."""

import numpy as np
import pytest

from cryptocast.sentiment import (
    AlignedSeries,
    SentimentDataError,
    SentimentPoint,
    SentimentSeries,
    align,
    label_to_score,
    load_sentiment_series,
)
from conftest import day, make_prices, make_sentiment


class TestLoader:
    def test_round_trip(self, sentiment_csv):
        path = sentiment_csv([0.5, -0.25, 0.0])
        series = load_sentiment_series(path)
        assert len(series) == 3
        assert series.by_date()[day(1)] == -0.25

    def test_header_only_is_empty_series(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("date,score\n", encoding="utf-8")
        series = load_sentiment_series(path)
        assert len(series) == 0

    def test_score_out_of_range_rejected(self, sentiment_csv):
        with pytest.raises(SentimentDataError, match=r"\[-1, 1\]"):
            load_sentiment_series(sentiment_csv([0.5, 1.5]))

    def test_bad_score_reports_line(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("date,score\n2021-01-01,good\n", encoding="utf-8")
        with pytest.raises(SentimentDataError, match=":2"):
            load_sentiment_series(path)

    def test_unsorted_rejected(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("date,score\n2021-01-02,0.1\n2021-01-01,0.2\n", encoding="utf-8")
        with pytest.raises(SentimentDataError, match="increasing"):
            load_sentiment_series(path)

    def test_missing_column(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("date,sentiment\n2021-01-01,0.1\n", encoding="utf-8")
        with pytest.raises(SentimentDataError, match="score"):
            load_sentiment_series(path)

    def test_boundary_scores_accepted(self, sentiment_csv):
        series = load_sentiment_series(sentiment_csv([-1.0, 1.0]))
        assert len(series) == 2


class TestLabelToScore:
    @pytest.mark.parametrize(
        "label,conf,expected",
        [
            ("positive", 0.9, 0.9),
            ("negative", 0.7, -0.7),
            ("neutral", 0.99, 0.0),
            ("Positive", 0.5, 0.5),
            ("NEGATIVE", 1.0, -1.0),
            ("positive", 0.0, 0.0),
        ],
    )
    def test_mapping(self, label, conf, expected):
        assert label_to_score(label, conf) == expected

    def test_unknown_label(self):
        with pytest.raises(SentimentDataError, match="unknown label"):
            label_to_score("bullish", 0.5)

    def test_bad_confidence(self):
        with pytest.raises(SentimentDataError):
            label_to_score("positive", 1.5)
        with pytest.raises(SentimentDataError):
            label_to_score("positive", -0.1)
        with pytest.raises(SentimentDataError):
            label_to_score("positive", float("nan"))

    def test_range_property(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            label = ("positive", "negative", "neutral")[int(rng.integers(3))]
            conf = float(rng.uniform(0.0, 1.0))
            assert -1.0 <= label_to_score(label, conf) <= 1.0


class TestAlign:
    def test_exact_match(self):
        prices = make_prices([10, 11, 12])
        sent = make_sentiment([0.1, -0.2, 0.3])
        joined = align(prices, sent)
        np.testing.assert_array_equal(joined.scores, [0.1, -0.2, 0.3])
        np.testing.assert_array_equal(joined.closes, [10.0, 11.0, 12.0])
        assert joined.dates == prices.dates()

    def test_neutral_fill(self, caplog):
        prices = make_prices([10, 11, 12])
        sent = make_sentiment([0.5])  # only the first day scored
        with caplog.at_level("WARNING"):
            joined = align(prices, sent, missing_policy="neutral_fill")
        np.testing.assert_array_equal(joined.scores, [0.5, 0.0, 0.0])
        assert any("missing sentiment" in r.message for r in caplog.records)

    def test_error_policy(self):
        prices = make_prices([10, 11, 12])
        sent = make_sentiment([0.5])
        with pytest.raises(SentimentDataError, match="lack sentiment"):
            align(prices, sent, missing_policy="error")

    def test_extra_sentiment_days_ignored(self):
        prices = make_prices([10, 11])
        sent = make_sentiment([0.1, 0.2, 0.3, 0.4])
        joined = align(prices, sent)
        assert len(joined) == 2
        np.testing.assert_array_equal(joined.scores, [0.1, 0.2])

    def test_empty_sentiment_rejected(self):
        prices = make_prices([10, 11])
        with pytest.raises(SentimentDataError, match="empty"):
            align(prices, SentimentSeries(()))

    def test_unknown_policy(self):
        with pytest.raises(SentimentDataError, match="missing_policy"):
            align(make_prices([10, 11]), make_sentiment([0.1, 0.2]), missing_policy="drop")


class TestTypes:
    def test_point_range(self):
        with pytest.raises(SentimentDataError):
            SentimentPoint(day(0), 2.0)

    def test_series_order(self):
        with pytest.raises(SentimentDataError, match="increasing"):
            SentimentSeries((SentimentPoint(day(1), 0.1), SentimentPoint(day(0), 0.2)))

    def test_aligned_length_check(self):
        with pytest.raises(SentimentDataError):
            AlignedSeries(
                dates=(day(0), day(1)),
                closes=np.array([1.0, 2.0]),
                scores=np.array([0.1]),
            )
