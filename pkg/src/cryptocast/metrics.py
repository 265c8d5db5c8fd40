"""Forecast error metrics and the comparison report writer.

MAPE is kept as a dimensionless fraction internally; the rendered
report spells out both the fraction and the percent form. Accuracy is
(1 - MAPE) * 100, a percentage.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cryptocast.backtest import write_signals


class MetricsError(ValueError):
    """Invalid metric inputs or malformed report request."""


def _pair(actual, predicted):
    a = np.asarray(actual, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if a.shape != p.shape or a.ndim != 1 or len(a) == 0:
        raise MetricsError(f"need equal-length vectors, got {a.shape} and {p.shape}")
    if not (np.isfinite(a).all() and np.isfinite(p).all()):
        raise MetricsError("inputs contain non-finite values")
    return a, p


def mae(actual, predicted) -> float:
    """Mean absolute error."""
    a, p = _pair(actual, predicted)
    return float(np.mean(np.abs(a - p)))


def mape(actual, predicted) -> float:
    """Mean absolute percentage error as a fraction (0.023 means 2.3%)."""
    a, p = _pair(actual, predicted)
    if (a == 0).any():
        raise MetricsError("mape is undefined when an actual value is zero")
    return float(np.mean(np.abs((a - p) / a)))


def accuracy(mape_value: float) -> float:
    """Complement of MAPE in percent: (1 - mape_value) * 100.

    Takes the dimensionless fraction; may go negative for mape > 1 and
    is reported as-is.
    """
    if not (isinstance(mape_value, (int, float)) and np.isfinite(mape_value)) or mape_value < 0:
        raise MetricsError(f"mape_value must be a finite non-negative fraction, got {mape_value!r}")
    return (1.0 - float(mape_value)) * 100.0


@dataclass(frozen=True)
class MetricSet:
    """MAE, MAPE (fraction), and accuracy (percent) for one forecast."""

    mae: float
    mape: float
    accuracy: float

    @classmethod
    def from_arrays(cls, actual, predicted) -> "MetricSet":
        m = mape(actual, predicted)
        return cls(mae=mae(actual, predicted), mape=m, accuracy=accuracy(m))

    def to_json_dict(self) -> dict:
        return {
            "mae": self.mae,
            "mape_fraction": self.mape,
            "mape_percent": self.mape * 100.0,
            "accuracy_percent": self.accuracy,
        }


@dataclass(frozen=True)
class ComparisonTable:
    """Metric rows by run columns, rendered with 5 significant digits."""

    row_names: tuple[str, ...]
    column_names: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]  # values[row][col]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.row_names):
            raise MetricsError(f"{len(self.values)} value rows for {len(self.row_names)} row names")
        for row in self.values:
            if len(row) != len(self.column_names):
                raise MetricsError(f"row of {len(row)} cells for {len(self.column_names)} columns")

    def render_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric", *self.column_names])
        for name, row in zip(self.row_names, self.values):
            writer.writerow([name, *(f"{v:.5g}" for v in row)])
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "rows": list(self.row_names),
            "columns": list(self.column_names),
            "values": [[float(v) for v in row] for row in self.values],
        }


def safe_name(name: str) -> str:
    """File-name-safe version of a run label."""
    cleaned = re.sub(r"[^A-Za-z0-9_-]+", "_", name).strip("_")
    if not cleaned:
        raise MetricsError(f"run name {name!r} has no usable characters")
    return cleaned


def write_history_csv(history, path) -> None:
    """Per-epoch loss curve as epoch,train_loss,val_metric (val may be blank)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_metric"])
        for epoch, loss in enumerate(history.train_loss, start=1):
            if epoch - 1 < len(history.val_metric):
                val = f"{history.val_metric[epoch - 1]:.8g}"
            else:
                val = ""
            writer.writerow([epoch, f"{loss:.8g}", val])


def emit_report(results: dict, ledgers: dict | None, out_dir) -> ComparisonTable:
    """Write the comparison report and per-run plot CSVs under out_dir.

    results maps run name -> ForecastResult; ledgers (optional) maps a
    subset of the same names -> TradeLedger. Produces report.json,
    report.csv, and per run <name>_predictions.csv plus
    <name>_history.csv; runs with a ledger also get <name>_signals.csv.
    Returns the comparison table.
    """
    if not results:
        raise MetricsError("need at least one forecast result to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    names = list(results.keys())
    used = set()
    for name in names:
        cleaned = safe_name(name)
        if cleaned in used:
            raise MetricsError(f"run names collide after sanitizing: {cleaned!r}")
        used.add(cleaned)

    metric_sets = {name: MetricSet.from_arrays(r.actual, r.predicted) for name, r in results.items()}

    row_names = ["mae", "mape_fraction", "mape_percent", "accuracy_percent"]
    has_ledgers = bool(ledgers)
    if has_ledgers:
        row_names += ["profit", "final_value", "trade_count"]
    rows = []
    for row in row_names:
        cells = []
        for name in names:
            ms = metric_sets[name]
            if row == "mae":
                cells.append(ms.mae)
            elif row == "mape_fraction":
                cells.append(ms.mape)
            elif row == "mape_percent":
                cells.append(ms.mape * 100.0)
            elif row == "accuracy_percent":
                cells.append(ms.accuracy)
            else:
                ledger = (ledgers or {}).get(name)
                if ledger is None:
                    cells.append(float("nan"))
                elif row == "profit":
                    cells.append(ledger.profit)
                elif row == "final_value":
                    cells.append(ledger.final_value)
                else:
                    cells.append(float(len(ledger.events)))
        rows.append(tuple(cells))
    table = ComparisonTable(row_names=tuple(row_names), column_names=tuple(names), values=tuple(rows))

    report = {
        "runs": {
            name: {
                "regime": results[name].regime,
                "metrics": metric_sets[name].to_json_dict(),
                "days": len(results[name].dates),
                "first_date": results[name].dates[0].isoformat(),
                "last_date": results[name].dates[-1].isoformat(),
                **(
                    {"backtest": (ledgers or {})[name].to_json_dict()}
                    if has_ledgers and name in (ledgers or {})
                    else {}
                ),
            }
            for name in names
        },
        "table": table.to_json_dict(),
    }
    (out / "report.json").write_text(
        json.dumps(report, sort_keys=True, indent=2, allow_nan=True) + "\n", encoding="utf-8"
    )
    (out / "report.csv").write_text(table.render_csv(), encoding="utf-8")

    for name, result in results.items():
        stem = safe_name(name)
        with open(out / f"{stem}_predictions.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date", "actual", "predicted"])
            for d, a, p in zip(result.dates, result.actual, result.predicted):
                writer.writerow([d.isoformat(), f"{a:.8g}", f"{p:.8g}"])
        write_history_csv(result.history, out / f"{stem}_history.csv")
        ledger = (ledgers or {}).get(name)
        if ledger is not None:
            write_signals(ledger, result.dates, out / f"{stem}_signals.csv")
    return table
