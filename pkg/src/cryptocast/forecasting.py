"""Prediction regimes over a daily close series.

Four evaluation setups share one pipeline (normalize, window, train,
predict, denormalize):

- intraday: hierarchical split; the target day's sentiment is available
  in every phase. Retrospective accuracy measurement.
- one_day_ahead: like intraday, but test inputs carry the previous
  day's sentiment so each prediction uses only information available
  before the target day. Training windows may still use the current
  day's score (default) or the previous day's.
- future_mdt: maximum-data training. Train on everything before the
  test cut with no validation segment, then roll the model forward m
  days autoregressively, feeding each prediction back as input.
- future_vet: validation-assisted training. Hold out the last m days
  of the training span, score an m-day rollout against them after every
  epoch, and keep the weights from the best epoch for the final m-day
  rollout.

Windows are built over the full normalized series and partitioned by
target day, so early test windows legitimately draw input history from
the tail of the training span. Min-max bounds are always fitted on the
training segment only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from cryptocast.nn.layers import forward_batch, network_forward
from cryptocast.nn.model import LayerSpec, NetworkModel
from cryptocast.nn.training import TrainHistory, mse_loss, train
from cryptocast.prices import (
    NormalizationParams,
    PriceSeries,
    denormalize,
    normalize,
    split_sizes,
)
from cryptocast.sentiment import SentimentSeries, align
from cryptocast.windows import (
    WindowedDataset,
    seq_plain,
    seq_with_cur_sent,
    seq_with_prev_sent,
)

REGIMES = ("intraday", "one_day_ahead", "future_mdt", "future_vet")


class RegimeError(ValueError):
    """Invalid regime configuration or data too short for it."""


@dataclass(frozen=True)
class RegimeConfig:
    """Everything a prediction run needs besides the data itself.

    sentiment_mode_train/test: "none", "current", or "previous"; which
    day's score the input windows carry during training and testing.
    m is the future horizon (future regimes only).
    """

    regime: str
    arch: tuple[LayerSpec, ...]
    n: int = 10
    lr: float = 0.02
    epochs: int = 100
    m: int = 30
    sentiment_mode_train: str = "none"
    sentiment_mode_test: str = "none"
    seed: int = 0
    outer_frac: float = 0.85
    inner_frac: float = 0.85
    missing_policy: str = "neutral_fill"
    clip_norm: float | None = None

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise RegimeError(f"unknown regime {self.regime!r}, expected one of {REGIMES}")
        if self.n < 1:
            raise RegimeError(f"window size n must be >= 1, got {self.n}")
        if self.lr <= 0:
            raise RegimeError(f"learning rate must be positive, got {self.lr}")
        if self.epochs < 1:
            raise RegimeError(f"epochs must be >= 1, got {self.epochs}")
        for mode, name in ((self.sentiment_mode_train, "train"), (self.sentiment_mode_test, "test")):
            if mode not in ("none", "current", "previous"):
                raise RegimeError(f"bad sentiment mode {mode!r} for {name}")
        if (self.sentiment_mode_train == "none") != (self.sentiment_mode_test == "none"):
            raise RegimeError("sentiment modes must be both none or both sentiment-bearing")
        if self.regime == "intraday":
            if self.sentiment_mode_train != self.sentiment_mode_test:
                raise RegimeError("intraday uses the same sentiment mode in every phase")
            if self.sentiment_mode_train == "previous":
                raise RegimeError("intraday supports sentiment modes 'none' and 'current'")
        elif self.regime == "one_day_ahead":
            if self.sentiment_mode_test not in ("none", "previous"):
                raise RegimeError("one_day_ahead test windows must use 'previous' or 'none'")
        else:
            if self.m < 1:
                raise RegimeError(f"future horizon m must be >= 1, got {self.m}")
            if self.sentiment_mode_train == "previous":
                raise RegimeError("future regimes support sentiment modes 'none' and 'current'")
            if self.sentiment_mode_test != self.sentiment_mode_train:
                raise RegimeError("future regimes reuse the training sentiment mode for rollouts")
        if not self.arch:
            raise RegimeError("arch must list at least one layer")

    def to_json_dict(self) -> dict:
        return {
            "regime": self.regime,
            "arch": [
                {
                    "kind": s.kind,
                    "units": s.units,
                    "return_sequences": s.return_sequences,
                    "activation": s.resolved_activation(),
                }
                for s in self.arch
            ],
            "n": self.n,
            "lr": self.lr,
            "epochs": self.epochs,
            "m": self.m,
            "sentiment_mode_train": self.sentiment_mode_train,
            "sentiment_mode_test": self.sentiment_mode_test,
            "seed": self.seed,
            "outer_frac": self.outer_frac,
            "inner_frac": self.inner_frac,
            "missing_policy": self.missing_policy,
            "clip_norm": self.clip_norm,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RegimeConfig":
        arch = tuple(
            LayerSpec(
                kind=layer["kind"],
                units=int(layer["units"]),
                return_sequences=bool(layer["return_sequences"]),
                activation=layer.get("activation", "default"),
            )
            for layer in data["arch"]
        )
        return cls(
            regime=data["regime"],
            arch=arch,
            n=int(data["n"]),
            lr=float(data["lr"]),
            epochs=int(data["epochs"]),
            m=int(data["m"]),
            sentiment_mode_train=data["sentiment_mode_train"],
            sentiment_mode_test=data["sentiment_mode_test"],
            seed=int(data["seed"]),
            outer_frac=float(data["outer_frac"]),
            inner_frac=float(data["inner_frac"]),
            missing_policy=data.get("missing_policy", "neutral_fill"),
            clip_norm=None if data.get("clip_norm") is None else float(data["clip_norm"]),
        )


@dataclass
class ForecastResult:
    """Test-segment predictions with their actuals, dates, and training history."""

    regime: str
    dates: tuple[date, ...]
    actual: np.ndarray
    predicted: np.ndarray
    history: TrainHistory
    config: RegimeConfig
    normalizer: NormalizationParams | None = None
    model: NetworkModel | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not (len(self.dates) == len(self.actual) == len(self.predicted)):
            raise RegimeError(
                f"result lengths differ: {len(self.dates)} dates, "
                f"{len(self.actual)} actual, {len(self.predicted)} predicted"
            )
        if len(self.dates) == 0:
            raise RegimeError("result must cover at least one day")
        if not (np.isfinite(self.actual).all() and np.isfinite(self.predicted).all()):
            raise RegimeError("result contains non-finite values")

    def to_json_dict(self) -> dict:
        return {
            "regime": self.regime,
            "config": self.config.to_json_dict(),
            "dates": [d.isoformat() for d in self.dates],
            "actual": [float(v) for v in self.actual],
            "predicted": [float(v) for v in self.predicted],
            "history": {
                "train_loss": [float(v) for v in self.history.train_loss],
                "val_metric": [float(v) for v in self.history.val_metric],
                "best_epoch": self.history.best_epoch,
            },
            "normalizer": None
            if self.normalizer is None
            else {"minimum": self.normalizer.minimum, "maximum": self.normalizer.maximum},
        }

    def save(self, path) -> None:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_forecast(path) -> ForecastResult:
    """Read a ForecastResult written by save(); the model is not restored."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RegimeError(f"cannot read forecast {path}: {exc}") from exc
    history = TrainHistory(
        train_loss=[float(v) for v in data["history"]["train_loss"]],
        val_metric=[float(v) for v in data["history"]["val_metric"]],
        best_epoch=int(data["history"]["best_epoch"]),
    )
    norm = data.get("normalizer")
    return ForecastResult(
        regime=data["regime"],
        dates=tuple(date.fromisoformat(d) for d in data["dates"]),
        actual=np.array(data["actual"], dtype=np.float64),
        predicted=np.array(data["predicted"], dtype=np.float64),
        history=history,
        config=RegimeConfig.from_json_dict(data["config"]),
        normalizer=None if norm is None else NormalizationParams(norm["minimum"], norm["maximum"]),
    )


def _aligned(prices: PriceSeries, sentiment: SentimentSeries | None, cfg: RegimeConfig):
    if cfg.sentiment_mode_train == "none":
        return prices.dates(), prices.closes(), np.zeros(len(prices))
    if sentiment is None:
        raise RegimeError("regime config uses sentiment but no sentiment series was given")
    aligned = align(prices, sentiment, cfg.missing_policy)
    return aligned.dates, aligned.closes, aligned.scores


def _build_windows(z: np.ndarray, scores: np.ndarray, n: int, mode: str) -> WindowedDataset:
    if mode == "none":
        return seq_plain(z, n)
    if mode == "current":
        return seq_with_cur_sent(z, scores, n)
    return seq_with_prev_sent(z, scores, n)


def _window_segment(ds: WindowedDataset, start: int, stop: int) -> WindowedDataset:
    """Windows whose target index falls in [start, stop); indices are absolute days."""
    lo, hi = start - ds.window_n, stop - ds.window_n
    return WindowedDataset(
        inputs=ds.inputs[lo:hi],
        targets=ds.targets[lo:hi],
        window_n=ds.window_n,
        sentiment_mode=ds.sentiment_mode,
    )


def _fit_from_values(values: np.ndarray) -> NormalizationParams:
    if len(values) < 2:
        raise RegimeError("normalization segment needs at least two points")
    return NormalizationParams(minimum=float(values.min()), maximum=float(values.max()))


@dataclass
class _EvalPrep:
    """Prepared data for the intraday / one_day_ahead path."""

    dates: tuple[date, ...]
    closes: np.ndarray
    norm: NormalizationParams
    train_ds: WindowedDataset
    val_ds: WindowedDataset
    test_ds: WindowedDataset
    train_n: int


def _prepare_eval(prices: PriceSeries, sentiment: SentimentSeries | None, cfg: RegimeConfig) -> _EvalPrep:
    total = len(prices)
    sub_n, val_n, test_n = split_sizes(total, cfg.outer_frac, cfg.inner_frac)
    train_n = sub_n + val_n
    if min(sub_n, val_n, test_n) < 1:
        raise RegimeError(f"split produces an empty segment: {sub_n}/{val_n}/{test_n}")
    if sub_n <= cfg.n:
        raise RegimeError(f"subtrain segment of {sub_n} day(s) is too short for window size {cfg.n}")

    dates, closes, scores = _aligned(prices, sentiment, cfg)
    norm = _fit_from_values(closes[:sub_n])
    z = normalize(closes, norm)

    ds_train_mode = _build_windows(z, scores, cfg.n, cfg.sentiment_mode_train)
    train_ds = _window_segment(ds_train_mode, cfg.n, sub_n)
    val_ds = _window_segment(ds_train_mode, sub_n, train_n)
    if cfg.sentiment_mode_test == cfg.sentiment_mode_train:
        ds_test_mode = ds_train_mode
    else:
        ds_test_mode = _build_windows(z, scores, cfg.n, cfg.sentiment_mode_test)
    test_ds = _window_segment(ds_test_mode, train_n, total)
    return _EvalPrep(
        dates=dates, closes=closes, norm=norm,
        train_ds=train_ds, val_ds=val_ds, test_ds=test_ds, train_n=train_n,
    )


def _eval_result(cfg: RegimeConfig, prep: _EvalPrep, model: NetworkModel, history: TrainHistory) -> ForecastResult:
    preds_norm, _ = forward_batch(model, prep.test_ds.inputs)
    return ForecastResult(
        regime=cfg.regime,
        dates=prep.dates[prep.train_n :],
        actual=prep.closes[prep.train_n :].copy(),
        predicted=denormalize(preds_norm, prep.norm),
        history=history,
        config=cfg,
        normalizer=prep.norm,
        model=model,
    )


def _run_eval_regime(prices: PriceSeries, sentiment: SentimentSeries | None, cfg: RegimeConfig) -> ForecastResult:
    """Shared path for intraday and one_day_ahead."""
    prep = _prepare_eval(prices, sentiment, cfg)
    model = NetworkModel.initialize(cfg.arch, input_width=1, seed=cfg.seed)

    def val_hook(current: NetworkModel) -> float:
        preds, _ = forward_batch(current, prep.val_ds.inputs)
        return mse_loss(preds, prep.val_ds.targets)

    history, model = train(model, prep.train_ds, cfg.epochs, cfg.lr, val_hook=val_hook, clip_norm=cfg.clip_norm)
    return _eval_result(cfg, prep, model, history)


def run_intraday(prices: PriceSeries, sentiment: SentimentSeries | None, cfg: RegimeConfig) -> ForecastResult:
    """Hierarchical split; same-day sentiment available in every phase."""
    if cfg.regime != "intraday":
        raise RegimeError(f"expected regime 'intraday', got {cfg.regime!r}")
    return _run_eval_regime(prices, sentiment, cfg)


def run_one_day_ahead(prices: PriceSeries, sentiment: SentimentSeries | None, cfg: RegimeConfig) -> ForecastResult:
    """Hierarchical split; test windows only see the previous day's sentiment."""
    if cfg.regime != "one_day_ahead":
        raise RegimeError(f"expected regime 'one_day_ahead', got {cfg.regime!r}")
    return _run_eval_regime(prices, sentiment, cfg)


def pred_next_m_days(model, seed_series, n: int, m: int, sentiment_slot: float | None = None) -> np.ndarray:
    """Autoregressive m-day rollout in normalized space.

    The window starts as the last n values of seed_series; each
    prediction is appended and the oldest value dropped, so predictions
    (not actuals) feed every later step. When sentiment_slot is given
    it is re-appended as the final input step every day (future days
    have no news, so callers pass neutral 0.0). model is a NetworkModel
    or a callable mapping a (steps, 1) array to a float.
    """
    if n < 1:
        raise RegimeError(f"window size n must be >= 1, got {n}")
    if m < 1:
        raise RegimeError(f"horizon m must be >= 1, got {m}")
    seed = np.asarray(seed_series, dtype=np.float64).ravel()
    if len(seed) < n:
        raise RegimeError(f"seed series of length {len(seed)} is shorter than window size {n}")
    window = [float(v) for v in seed[-n:]]
    if callable(model):
        predict = model
    else:
        predict = lambda seq: network_forward(model, seq)[0]
    preds = np.empty(m)
    for step in range(m):
        seq = np.array(window, dtype=np.float64)[:, None]
        if sentiment_slot is not None:
            seq = np.vstack([seq, [[float(sentiment_slot)]]])
        value = float(predict(seq))
        if not math.isfinite(value):
            raise RegimeError(f"rollout produced a non-finite value at step {step + 1}")
        preds[step] = value
        window = window[1:] + [value]
    return preds


@dataclass
class _FuturePrep:
    """Prepared data for the future_mdt / future_vet path."""

    dates: tuple[date, ...]
    closes: np.ndarray
    norm: NormalizationParams
    z: np.ndarray
    train_ds: WindowedDataset
    train_n: int
    sub_n: int | None
    slot: float | None


def _prepare_future(prices: PriceSeries, sentiment: SentimentSeries | None, cfg: RegimeConfig) -> _FuturePrep:
    total = len(prices)
    train_n, test_n = split_sizes(total, cfg.outer_frac)
    if cfg.m > test_n:
        raise RegimeError(f"horizon m={cfg.m} exceeds the {test_n}-day test segment")
    dates, closes, scores = _aligned(prices, sentiment, cfg)

    if cfg.regime == "future_vet":
        sub_n: int | None = train_n - cfg.m
        fit_n = sub_n
        if fit_n <= cfg.n:
            raise RegimeError(
                f"{train_n} training day(s) minus an m={cfg.m} validation window "
                f"leaves {fit_n} day(s), too short for window size {cfg.n}"
            )
    else:
        sub_n = None
        fit_n = train_n
        if fit_n <= cfg.n:
            raise RegimeError(f"training segment of {fit_n} day(s) is too short for window size {cfg.n}")

    norm = _fit_from_values(closes[:fit_n])
    z = normalize(closes, norm)
    train_ds = _build_windows(z[:fit_n], scores[:fit_n], cfg.n, cfg.sentiment_mode_train)
    slot = 0.0 if cfg.sentiment_mode_train != "none" else None
    return _FuturePrep(
        dates=dates, closes=closes, norm=norm, z=z,
        train_ds=train_ds, train_n=train_n, sub_n=sub_n, slot=slot,
    )


def _future_result(cfg: RegimeConfig, prep: _FuturePrep, model: NetworkModel, history: TrainHistory) -> ForecastResult:
    preds_norm = pred_next_m_days(model, prep.z[: prep.train_n], cfg.n, cfg.m, sentiment_slot=prep.slot)
    stop = prep.train_n + cfg.m
    return ForecastResult(
        regime=cfg.regime,
        dates=prep.dates[prep.train_n : stop],
        actual=prep.closes[prep.train_n : stop].copy(),
        predicted=denormalize(preds_norm, prep.norm),
        history=history,
        config=cfg,
        normalizer=prep.norm,
        model=model,
    )


def run_future_mdt(prices: PriceSeries, sentiment: SentimentSeries | None, cfg: RegimeConfig) -> ForecastResult:
    """Maximum-data training: fit on all pre-test days, roll out m days."""
    if cfg.regime != "future_mdt":
        raise RegimeError(f"expected regime 'future_mdt', got {cfg.regime!r}")
    prep = _prepare_future(prices, sentiment, cfg)
    model = NetworkModel.initialize(cfg.arch, input_width=1, seed=cfg.seed)
    history, model = train(model, prep.train_ds, cfg.epochs, cfg.lr, clip_norm=cfg.clip_norm)
    return _future_result(cfg, prep, model, history)


def run_future_vet(prices: PriceSeries, sentiment: SentimentSeries | None, cfg: RegimeConfig) -> ForecastResult:
    """Validation-assisted training: hold out the last m pre-test days,
    score an m-day rollout against them each epoch, keep the best weights."""
    if cfg.regime != "future_vet":
        raise RegimeError(f"expected regime 'future_vet', got {cfg.regime!r}")
    prep = _prepare_future(prices, sentiment, cfg)
    assert prep.sub_n is not None
    val_actual = prep.z[prep.sub_n : prep.train_n]
    val_seed = prep.z[: prep.sub_n]

    def val_hook(current: NetworkModel) -> float:
        rollout = pred_next_m_days(current, val_seed, cfg.n, cfg.m, sentiment_slot=prep.slot)
        return float(np.mean(np.abs(rollout - val_actual)))

    model = NetworkModel.initialize(cfg.arch, input_width=1, seed=cfg.seed)
    history, model = train(model, prep.train_ds, cfg.epochs, cfg.lr, val_hook=val_hook, clip_norm=cfg.clip_norm)
    return _future_result(cfg, prep, model, history)


def run_regime(prices: PriceSeries, sentiment: SentimentSeries | None, cfg: RegimeConfig) -> ForecastResult:
    """Dispatch to the regime named in cfg."""
    runner = {
        "intraday": run_intraday,
        "one_day_ahead": run_one_day_ahead,
        "future_mdt": run_future_mdt,
        "future_vet": run_future_vet,
    }[cfg.regime]
    return runner(prices, sentiment, cfg)


def predict_with_model(
    prices: PriceSeries,
    sentiment: SentimentSeries | None,
    cfg: RegimeConfig,
    model: NetworkModel,
) -> ForecastResult:
    """Run only the prediction stage of a regime with already-trained weights.

    Rebuilds the splits, normalizer and windows exactly as the matching
    run_* function would, then skips straight to test-set inference (or
    the m-day rollout). The returned history is empty since no training
    happened here.
    """
    expected = tuple(cfg.arch)
    if tuple(model.specs) != expected:
        raise RegimeError(
            f"model architecture {tuple(model.specs)!r} does not match the configured {expected!r}"
        )
    history = TrainHistory(train_loss=[], val_metric=[], best_epoch=0)
    if cfg.regime in ("intraday", "one_day_ahead"):
        prep_eval = _prepare_eval(prices, sentiment, cfg)
        return _eval_result(cfg, prep_eval, model, history)
    prep_future = _prepare_future(prices, sentiment, cfg)
    return _future_result(cfg, prep_future, model, history)
