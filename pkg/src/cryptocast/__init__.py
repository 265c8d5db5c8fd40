"""Daily crypto price forecasting with news sentiment, plus a threshold trading backtester.

The package covers the full pipeline: load and normalize a daily close
series, align it with per-day sentiment scores, window it into supervised
sequences, train a from-scratch LSTM or Bi-LSTM regressor with BPTT and
Adam, produce predictions under one of four evaluation regimes, and feed
those predictions into a threshold trading strategy with fee-aware
accounting.
"""

from cryptocast.prices import (
    NormalizationParams,
    PriceDataError,
    PricePoint,
    PriceSeries,
    SplitResult,
    denormalize,
    fit_normalizer,
    load_price_series,
    normalize,
    split_hierarchical,
    split_simple,
)
from cryptocast.sentiment import (
    AlignedSeries,
    SentimentDataError,
    SentimentPoint,
    SentimentSeries,
    align,
    label_to_score,
    load_sentiment_series,
)
from cryptocast.windows import (
    WindowedDataset,
    WindowError,
    seq_plain,
    seq_with_cur_sent,
    seq_with_prev_sent,
)
from cryptocast.forecasting import (
    ForecastResult,
    RegimeConfig,
    RegimeError,
    load_forecast,
    pred_next_m_days,
    predict_with_model,
    run_future_mdt,
    run_future_vet,
    run_intraday,
    run_one_day_ahead,
    run_regime,
)
from cryptocast.backtest import (
    BacktestError,
    PortfolioState,
    ReturnStats,
    StrategyConfig,
    TradeEvent,
    TradeLedger,
    perfect_foresight_backtest,
    return_stats,
    run_backtest,
    write_signals,
)
from cryptocast.metrics import (
    ComparisonTable,
    MetricSet,
    MetricsError,
    accuracy,
    emit_report,
    mae,
    mape,
    safe_name,
    write_history_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AlignedSeries",
    "BacktestError",
    "ComparisonTable",
    "ForecastResult",
    "MetricSet",
    "MetricsError",
    "NormalizationParams",
    "PortfolioState",
    "PriceDataError",
    "PricePoint",
    "PriceSeries",
    "RegimeConfig",
    "RegimeError",
    "ReturnStats",
    "SentimentDataError",
    "SentimentPoint",
    "SentimentSeries",
    "SplitResult",
    "StrategyConfig",
    "TradeEvent",
    "TradeLedger",
    "WindowError",
    "WindowedDataset",
    "accuracy",
    "align",
    "denormalize",
    "emit_report",
    "fit_normalizer",
    "label_to_score",
    "load_forecast",
    "load_price_series",
    "mae",
    "mape",
    "normalize",
    "perfect_foresight_backtest",
    "pred_next_m_days",
    "predict_with_model",
    "return_stats",
    "run_backtest",
    "run_future_mdt",
    "run_future_vet",
    "run_intraday",
    "run_one_day_ahead",
    "run_regime",
    "safe_name",
    "seq_plain",
    "seq_with_cur_sent",
    "seq_with_prev_sent",
    "split_hierarchical",
    "split_simple",
    "write_history_csv",
    "write_signals",
]
