"""Threshold trading strategy driven by next-day price predictions.

Walking forward from day 1, the strategy compares each day's prediction
against yesterday's actual close. A predicted relative rise above the
buy threshold converts all cash into the asset at yesterday's close; a
predicted relative drop beyond the sell threshold liquidates the whole
position. A proportional transaction fee is charged on both sides. The
run never trades on day 0 (there is no previous close) and holdings are
marked to the final actual close at the end.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class BacktestError(ValueError):
    """Invalid strategy configuration or inconsistent inputs."""


@dataclass(frozen=True)
class StrategyConfig:
    """Trading rule parameters.

    buy_threshold / sell_threshold are relative-move magnitudes (0.03
    means 3%); tx_rate is the proportional fee per trade side.
    """

    buy_threshold: float
    sell_threshold: float
    tx_rate: float = 0.0
    initial_capital: float = 100_000.0

    def __post_init__(self) -> None:
        for name, v in (("buy_threshold", self.buy_threshold), ("sell_threshold", self.sell_threshold)):
            if not (isinstance(v, (int, float)) and math.isfinite(v)) or v <= 0:
                raise BacktestError(f"{name} must be a finite positive number, got {v!r}")
        if not 0.0 <= self.tx_rate < 1.0:
            raise BacktestError(f"tx_rate must be in [0, 1), got {self.tx_rate}")
        if not self.initial_capital > 0:
            raise BacktestError(f"initial_capital must be positive, got {self.initial_capital}")

    def to_json_dict(self) -> dict:
        return {
            "buy_threshold": self.buy_threshold,
            "sell_threshold": self.sell_threshold,
            "tx_rate": self.tx_rate,
            "initial_capital": self.initial_capital,
        }


@dataclass
class PortfolioState:
    """Cash balance and asset units held."""

    cash: float
    holdings: float = 0.0

    def __post_init__(self) -> None:
        if self.cash < 0 or self.holdings < 0:
            raise BacktestError(f"negative portfolio state: cash={self.cash}, holdings={self.holdings}")

    def value(self, price: float) -> float:
        return self.cash + self.holdings * price


@dataclass(frozen=True)
class TradeEvent:
    """One executed trade. day indexes the prediction axis; price is the fill price."""

    day: int
    action: str  # "buy" or "sell"
    price: float
    units: float
    fee: float
    cash_after: float
    holdings_after: float

    def to_json_dict(self) -> dict:
        return {
            "day": self.day,
            "action": self.action,
            "price": self.price,
            "units": self.units,
            "fee": self.fee,
            "cash_after": self.cash_after,
            "holdings_after": self.holdings_after,
        }


@dataclass
class TradeLedger:
    """Full accounting of one backtest run."""

    config: StrategyConfig
    events: list[TradeEvent]
    final_state: PortfolioState
    final_price: float
    total_fees: float

    def __post_init__(self) -> None:
        last = "sell"
        for ev in self.events:
            if ev.action not in ("buy", "sell"):
                raise BacktestError(f"unknown action {ev.action!r}")
            if ev.action == last:
                raise BacktestError(f"consecutive {ev.action} events; trades must alternate")
            last = ev.action

    @property
    def final_value(self) -> float:
        return self.final_state.value(self.final_price)

    @property
    def profit(self) -> float:
        return self.final_value - self.config.initial_capital

    def to_json_dict(self) -> dict:
        return {
            "config": self.config.to_json_dict(),
            "events": [ev.to_json_dict() for ev in self.events],
            "final_cash": self.final_state.cash,
            "final_holdings": self.final_state.holdings,
            "final_price": self.final_price,
            "final_value": self.final_value,
            "profit": self.profit,
            "total_fees": self.total_fees,
            "trade_count": len(self.events),
        }

    def save(self, path) -> None:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")


def run_backtest(actuals, predictions, config: StrategyConfig) -> TradeLedger:
    """Run the threshold strategy over aligned actual/prediction vectors.

    Walking i from 1: with y_prev = actuals[i-1] and p = predictions[i],
    buy when (p - y_prev) / y_prev > buy_threshold and cash > 0, with
    units = cash * (1 - tx_rate) / y_prev; sell when
    (y_prev - p) / y_prev > sell_threshold and holdings > 0, with
    proceeds = holdings * y_prev * (1 - tx_rate). These expressions are
    the exact arithmetic used, so independent reimplementations can
    match the ledger to the last unit of currency. Holdings are valued
    at actuals[-1] at the end.
    """
    act = np.asarray(actuals, dtype=np.float64)
    pred = np.asarray(predictions, dtype=np.float64)
    if pred.shape != act.shape or pred.ndim != 1:
        raise BacktestError(f"actuals {act.shape} and predictions {pred.shape} must be equal-length vectors")
    if len(act) < 2:
        raise BacktestError("need at least two days to trade")
    if not np.isfinite(pred).all() or not np.isfinite(act).all():
        raise BacktestError("inputs contain non-finite values")
    if (act <= 0).any():
        raise BacktestError("actual prices must be positive")

    state = PortfolioState(cash=config.initial_capital)
    events: list[TradeEvent] = []
    total_fees = 0.0
    for i in range(1, len(pred)):
        y_prev = act[i - 1]
        rise = (pred[i] - y_prev) / y_prev
        drop = (y_prev - pred[i]) / y_prev
        if rise > config.buy_threshold and state.cash > 0:
            units = state.cash * (1.0 - config.tx_rate) / y_prev
            fee = state.cash * config.tx_rate
            state = PortfolioState(cash=0.0, holdings=state.holdings + units)
            total_fees += fee
            events.append(
                TradeEvent(
                    day=i, action="buy", price=y_prev, units=units, fee=fee,
                    cash_after=state.cash, holdings_after=state.holdings,
                )
            )
        elif drop > config.sell_threshold and state.holdings > 0:
            proceeds = state.holdings * y_prev * (1.0 - config.tx_rate)
            fee = state.holdings * y_prev * config.tx_rate
            units = state.holdings
            state = PortfolioState(cash=state.cash + proceeds, holdings=0.0)
            total_fees += fee
            events.append(
                TradeEvent(
                    day=i, action="sell", price=y_prev, units=units, fee=fee,
                    cash_after=state.cash, holdings_after=state.holdings,
                )
            )
    return TradeLedger(
        config=config,
        events=events,
        final_state=state,
        final_price=float(act[-1]),
        total_fees=total_fees,
    )


def perfect_foresight_backtest(actuals, config: StrategyConfig) -> TradeLedger:
    """Upper-bound run: feed the actual closes in as their own predictions."""
    return run_backtest(actuals, actuals, config)


@dataclass(frozen=True)
class ReturnStats:
    """Mean and population standard deviation of simple daily returns."""

    mean: float
    std: float
    count: int


def return_stats(prices) -> ReturnStats:
    """Daily-return statistics of a price vector (population std, ddof=0)."""
    arr = np.asarray(prices, dtype=np.float64)
    if arr.ndim != 1 or len(arr) < 2:
        raise BacktestError(f"need a vector of at least two prices, got shape {arr.shape}")
    if (arr <= 0).any():
        raise BacktestError("prices must be positive")
    rets = arr[1:] / arr[:-1] - 1.0
    return ReturnStats(mean=float(rets.mean()), std=float(rets.std(ddof=0)), count=len(rets))


def write_signals(ledger: TradeLedger, dates, path) -> None:
    """Write the executed trades as a date,action,price CSV."""
    dates = tuple(dates)
    for ev in ledger.events:
        if not 0 <= ev.day < len(dates):
            raise BacktestError(f"event day {ev.day} is outside the {len(dates)}-day date axis")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "action", "price"])
        for ev in ledger.events:
            writer.writerow([dates[ev.day].isoformat(), ev.action, f"{ev.price:.8g}"])
