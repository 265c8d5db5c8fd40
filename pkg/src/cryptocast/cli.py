"""Command-line front end: config file in, artifacts out.

Run configuration lives in a flat key-value text file (``key = value``
per line, ``#`` starts a comment). Recognized keys:

    asset           label used for defaults and reports (btc, eth, ...)
    prices          path to the price CSV (date,close)
    sentiment       path to the sentiment CSV (date,score)
    regime          intraday | one_day_ahead | future_mdt | future_vet
    model           lstm | bilstm
    use_sentiment   true | false
    units           recurrent layer sizes, e.g. "50,30,20"
    n               input window length (days)
    lr              Adam learning rate
    epochs          training epochs
    m               forecast horizon for the future regimes
    sentiment_train_mode   current | previous (one_day_ahead training)
    missing_policy  neutral_fill | error (days without a score)
    buy_threshold   predicted-rise fraction that triggers a buy
    sell_threshold  predicted-drop fraction that triggers a sell
    tx_rate         proportional transaction fee
    initial_capital starting cash for the backtest
    seed            RNG seed for weight init
    out             output directory
    name            run label used in file names and report columns
    outer_frac      train fraction of the full series
    inner_frac      subtrain fraction of the training span
    clip_norm       optional global gradient-norm cap

Flags override file values. Unset keys fall back to the asset's
defaults (see _UNITS_DEFAULTS / _STRATEGY_DEFAULTS); n and lr have
defaults only for the two evaluation regimes and must be given
explicitly for future_mdt / future_vet. Every command exits nonzero
with a one-line diagnostic on failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from cryptocast.backtest import (
    StrategyConfig,
    perfect_foresight_backtest,
    run_backtest,
    write_signals,
)
from cryptocast.forecasting import (
    REGIMES,
    RegimeConfig,
    load_forecast,
    predict_with_model,
    run_regime,
)
from cryptocast.metrics import emit_report, safe_name, write_history_csv
from cryptocast.nn.checkpoint import load_checkpoint, save_checkpoint
from cryptocast.nn.model import layer_specs
from cryptocast.nn.training import TrainingDiverged
from cryptocast.prices import load_price_series
from cryptocast.sentiment import load_sentiment_series

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Malformed or incomplete run configuration."""


_UNITS_DEFAULTS = {
    ("btc", "lstm"): (50, 30, 20),
    ("eth", "lstm"): (55, 25, 20),
    ("btc", "bilstm"): (55, 25, 20),
    ("eth", "bilstm"): (55, 25, 20),
}
# (buy_threshold, sell_threshold, tx_rate) per asset
_STRATEGY_DEFAULTS = {
    "btc": (0.030, 0.010, 0.0001),
    "eth": (0.025, 0.015, 0.003),
}

KNOWN_KEYS = frozenset(
    {
        "asset", "prices", "sentiment", "regime", "model", "use_sentiment",
        "units", "n", "lr", "epochs", "m", "sentiment_train_mode",
        "missing_policy", "buy_threshold", "sell_threshold", "tx_rate",
        "initial_capital", "seed", "out", "name", "outer_frac", "inner_frac",
        "clip_norm",
    }
)


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Flat key-value lines into a dict; rejects unknown and repeated keys."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key = key.strip().lower()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def _parse_bool(key: str, value: str) -> bool:
    low = value.lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {value!r}")


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {value!r}") from None


def _parse_units(value: str) -> tuple[int, ...]:
    parts = [p for chunk in value.split(",") for p in chunk.split()]
    if not parts:
        raise ConfigError("units must list at least one layer size")
    sizes = tuple(_parse_int("units", p) for p in parts)
    if any(s < 1 for s in sizes):
        raise ConfigError(f"units must be positive, got {sizes}")
    return sizes


@dataclass(frozen=True)
class RunConfig:
    """One resolved run: data paths, regime, architecture, strategy, output."""

    asset: str
    prices: Path | None
    sentiment: Path | None
    regime: str
    model: str
    use_sentiment: bool
    units: tuple[int, ...]
    n: int
    lr: float
    epochs: int
    m: int
    sentiment_train_mode: str
    missing_policy: str
    strategy: StrategyConfig
    seed: int
    out: Path
    name: str
    outer_frac: float
    inner_frac: float
    clip_norm: float | None

    def to_regime_config(self) -> RegimeConfig:
        if self.use_sentiment:
            if self.regime == "one_day_ahead":
                train_mode = self.sentiment_train_mode
                test_mode = "previous"
            else:
                train_mode = test_mode = "current"
        else:
            train_mode = test_mode = "none"
        return RegimeConfig(
            regime=self.regime,
            arch=layer_specs(self.model, self.units),
            n=self.n,
            lr=self.lr,
            epochs=self.epochs,
            m=self.m,
            sentiment_mode_train=train_mode,
            sentiment_mode_test=test_mode,
            seed=self.seed,
            outer_frac=self.outer_frac,
            inner_frac=self.inner_frac,
            missing_policy=self.missing_policy,
            clip_norm=self.clip_norm,
        )


def resolve_run_config(values: dict[str, str], overrides: dict | None = None) -> RunConfig:
    """File values + flag overrides + asset defaults into a RunConfig."""
    overrides = overrides or {}

    asset = values.get("asset", "btc").strip().lower()
    if not asset:
        raise ConfigError("asset must be a non-empty label")
    model = values.get("model", "lstm").strip().lower()
    if model not in ("lstm", "bilstm"):
        raise ConfigError(f"model must be 'lstm' or 'bilstm', got {model!r}")
    regime = values.get("regime", "intraday").strip().lower()
    if regime not in REGIMES:
        raise ConfigError(f"regime must be one of {', '.join(REGIMES)}, got {regime!r}")
    use_sentiment = _parse_bool("use_sentiment", values["use_sentiment"]) if "use_sentiment" in values else False

    if "units" in values:
        units = _parse_units(values["units"])
    else:
        units = _UNITS_DEFAULTS.get((asset, model), _UNITS_DEFAULTS[("btc", model)])

    future = regime in ("future_mdt", "future_vet")
    n_raw = overrides.get("n")
    if n_raw is None and "n" in values:
        n_raw = _parse_int("n", values["n"])
    lr_raw = overrides.get("lr")
    if lr_raw is None and "lr" in values:
        lr_raw = _parse_float("lr", values["lr"])
    if future and n_raw is None:
        raise ConfigError(f"regime {regime} needs an explicit n (window length); set it in the config or pass --n")
    if future and lr_raw is None:
        raise ConfigError(f"regime {regime} needs an explicit lr (learning rate); set it in the config or pass --lr")
    n = 10 if n_raw is None else int(n_raw)
    lr = 0.02 if lr_raw is None else float(lr_raw)

    epochs = _parse_int("epochs", values["epochs"]) if "epochs" in values else 100
    m = _parse_int("m", values["m"]) if "m" in values else 30
    if epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {epochs}")

    mode = values.get("sentiment_train_mode", "current").strip().lower()
    if mode not in ("current", "previous"):
        raise ConfigError(f"sentiment_train_mode must be 'current' or 'previous', got {mode!r}")
    policy = values.get("missing_policy", "neutral_fill").strip().lower()

    strat_default = _STRATEGY_DEFAULTS.get(asset, _STRATEGY_DEFAULTS["btc"])
    buy = _parse_float("buy_threshold", values["buy_threshold"]) if "buy_threshold" in values else strat_default[0]
    sell = _parse_float("sell_threshold", values["sell_threshold"]) if "sell_threshold" in values else strat_default[1]
    rate = _parse_float("tx_rate", values["tx_rate"]) if "tx_rate" in values else strat_default[2]
    capital = _parse_float("initial_capital", values["initial_capital"]) if "initial_capital" in values else 100_000.0
    strategy = StrategyConfig(buy_threshold=buy, sell_threshold=sell, tx_rate=rate, initial_capital=capital)

    seed = overrides.get("seed")
    if seed is None:
        seed = _parse_int("seed", values["seed"]) if "seed" in values else 0
    out = overrides.get("out")
    if out is None:
        out = values.get("out", "out")

    default_name = f"finbert_{model}" if use_sentiment else model
    name = values.get("name", default_name).strip()
    if not name or safe_name(name) != name:
        raise ConfigError(f"name must be a filesystem-safe label, got {name!r}")

    outer = _parse_float("outer_frac", values["outer_frac"]) if "outer_frac" in values else 0.85
    inner = _parse_float("inner_frac", values["inner_frac"]) if "inner_frac" in values else 0.85

    clip: float | None = None
    if values.get("clip_norm", "").strip().lower() not in ("", "none"):
        clip = _parse_float("clip_norm", values["clip_norm"])

    if use_sentiment and "sentiment" not in values:
        raise ConfigError("use_sentiment is true but no sentiment file is configured")

    return RunConfig(
        asset=asset,
        prices=Path(values["prices"]) if "prices" in values else None,
        sentiment=Path(values["sentiment"]) if "sentiment" in values else None,
        regime=regime,
        model=model,
        use_sentiment=use_sentiment,
        units=units,
        n=n,
        lr=lr,
        epochs=epochs,
        m=m,
        sentiment_train_mode=mode,
        missing_policy=policy,
        strategy=strategy,
        seed=int(seed),
        out=Path(out),
        name=name,
        outer_frac=outer,
        inner_frac=inner,
        clip_norm=clip,
    )


def load_run_config(path, overrides: dict | None = None) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    return resolve_run_config(parse_config_text(text, source=str(path)), overrides)


def _load_inputs(rc: RunConfig):
    if rc.prices is None:
        raise ConfigError("config does not set a prices file")
    prices = load_price_series(rc.prices)
    sentiment = None
    if rc.use_sentiment:
        sentiment = load_sentiment_series(rc.sentiment)
    return prices, sentiment


def _overrides_from_args(args) -> dict:
    return {
        "seed": getattr(args, "seed", None),
        "out": getattr(args, "out", None),
        "n": getattr(args, "n", None),
        "lr": getattr(args, "lr", None),
    }


def cmd_train(args) -> int:
    rc = load_run_config(args.config, _overrides_from_args(args))
    prices, sentiment = _load_inputs(rc)
    result = run_regime(prices, sentiment, rc.to_regime_config())

    rc.out.mkdir(parents=True, exist_ok=True)
    ckpt_path = rc.out / f"{rc.name}.ckpt"
    save_checkpoint(result.model, ckpt_path)
    hist_path = rc.out / f"{rc.name}_history.csv"
    write_history_csv(result.history, hist_path)

    hist = result.history
    print(
        f"trained {rc.name} ({rc.regime}, seed {rc.seed}): "
        f"loss {hist.train_loss[0]:.6g} -> {hist.train_loss[-1]:.6g}, "
        f"best epoch {hist.best_epoch}/{len(hist.train_loss)}"
    )
    print(f"wrote {ckpt_path} and {hist_path}")
    return 0


def cmd_predict(args) -> int:
    rc = load_run_config(args.config, _overrides_from_args(args))
    prices, sentiment = _load_inputs(rc)
    model = load_checkpoint(args.checkpoint)
    result = predict_with_model(prices, sentiment, rc.to_regime_config(), model)

    rc.out.mkdir(parents=True, exist_ok=True)
    out_path = rc.out / f"{rc.name}_forecast.json"
    result.save(out_path)
    print(f"predicted {len(result.predicted)} day(s) ({rc.regime}); wrote {out_path}")
    return 0


def cmd_backtest(args) -> int:
    rc = load_run_config(args.config, _overrides_from_args(args))
    forecast = load_forecast(args.predictions)
    if args.perfect:
        ledger = perfect_foresight_backtest(forecast.actual, rc.strategy)
        stem = f"{rc.name}_perfect"
    else:
        ledger = run_backtest(forecast.actual, forecast.predicted, rc.strategy)
        stem = rc.name

    rc.out.mkdir(parents=True, exist_ok=True)
    ledger_path = rc.out / f"{stem}_ledger.json"
    ledger.save(ledger_path)
    signals_path = rc.out / f"{stem}_signals.csv"
    write_signals(ledger, forecast.dates, signals_path)
    print(
        f"backtest {stem}: {len(ledger.events)} trade(s), "
        f"final value {ledger.final_value:.2f}, profit {ledger.profit:.2f}"
    )
    print(f"wrote {ledger_path} and {signals_path}")
    return 0


def cmd_compare(args) -> int:
    overrides = _overrides_from_args(args)
    configs = [load_run_config(path, overrides) for path in args.config]

    first = configs[0]
    names = [rc.name for rc in configs]
    if len(set(names)) != len(names):
        raise ConfigError(f"run names must be unique, got {names}")
    for rc in configs[1:]:
        if rc.asset != first.asset:
            raise ConfigError(f"configs mix assets {first.asset!r} and {rc.asset!r}")
        if rc.prices != first.prices:
            raise ConfigError(f"configs mix price files {first.prices} and {rc.prices}")
        if rc.regime != first.regime:
            raise ConfigError(f"configs mix regimes {first.regime!r} and {rc.regime!r}")

    results = {}
    ledgers = {}
    for rc in configs:
        prices, sentiment = _load_inputs(rc)
        result = run_regime(prices, sentiment, rc.to_regime_config())
        results[rc.name] = result
        ledgers[rc.name] = run_backtest(result.actual, result.predicted, rc.strategy)
        print(f"ran {rc.name} ({rc.regime}, seed {rc.seed})")

    out = Path(overrides["out"]) if overrides.get("out") else first.out
    emit_report(results, ledgers, out)
    print(f"wrote report.json and report.csv to {out}")
    return 0


def cmd_sentiment_check(args) -> int:
    series = load_sentiment_series(args.file)
    if len(series):
        first = series.points[0].day.isoformat()
        last = series.points[-1].day.isoformat()
        print(f"ok: {len(series)} row(s), {first} to {last}")
    else:
        print("ok: 0 rows (header only)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cryptocast",
        description="Forecast daily crypto closes and backtest a threshold strategy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, multi_config=False):
        if multi_config:
            p.add_argument("--config", action="append", required=True, metavar="FILE",
                           help="run config file (repeatable)")
        else:
            p.add_argument("--config", required=True, metavar="FILE", help="run config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, metavar="DIR", help="override the output directory")

    p_train = sub.add_parser("train", help="train a model and write a checkpoint")
    add_common(p_train)
    p_train.add_argument("--n", type=int, default=None, help="override the window length")
    p_train.add_argument("--lr", type=float, default=None, help="override the learning rate")
    p_train.set_defaults(func=cmd_train)

    p_predict = sub.add_parser("predict", help="run a checkpoint over the configured data")
    add_common(p_predict)
    p_predict.add_argument("--n", type=int, default=None, help="override the window length")
    p_predict.add_argument("--lr", type=float, default=None, help="override the learning rate")
    p_predict.add_argument("--checkpoint", required=True, metavar="FILE", help="trained model file")
    p_predict.set_defaults(func=cmd_predict)

    p_backtest = sub.add_parser("backtest", help="trade a forecast with the threshold strategy")
    add_common(p_backtest)
    p_backtest.add_argument("--predictions", required=True, metavar="FILE", help="forecast JSON from predict")
    p_backtest.add_argument("--perfect", action="store_true", help="trade on the actual prices instead")
    p_backtest.set_defaults(func=cmd_backtest)

    p_compare = sub.add_parser("compare", help="train several configs and write one report")
    add_common(p_compare, multi_config=True)
    p_compare.set_defaults(func=cmd_compare)

    p_check = sub.add_parser("sentiment-check", help="validate a sentiment CSV against the schema")
    p_check.add_argument("file", help="sentiment CSV to validate")
    p_check.set_defaults(func=cmd_sentiment_check)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s", level=logging.WARNING)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, TrainingDiverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
