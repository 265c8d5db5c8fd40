"""End-to-end acceptance suite.

Each test function checks one headline guarantee of the package, at its
stated tolerance, so `pytest tests/test_acceptance.py -v` prints one
pass/fail line per guarantee. Reference computations (finite
differences, window indexing, the trading day-loop) are re-derived in
this file on purpose rather than imported from the other test modules.
"""

import time
from datetime import date, timedelta

import numpy as np
import pytest

from cryptocast import (
    NormalizationParams,
    PriceDataError,
    RegimeConfig,
    StrategyConfig,
    accuracy,
    denormalize,
    fit_normalizer,
    mae,
    mape,
    normalize,
    pred_next_m_days,
    run_backtest,
    run_intraday,
    run_regime,
    seq_plain,
    seq_with_cur_sent,
    seq_with_prev_sent,
)
from cryptocast.cli import main as cli_main
from cryptocast.nn import LayerSpec, NetworkModel, layer_specs, network_forward
from cryptocast.nn.layers import backward, forward_batch
from cryptocast.nn.training import mse_loss
from cryptocast.prices import split_sizes

from conftest import make_prices, make_sentiment, write_price_csv


# ---------------------------------------------------------------- gradients


def _mixed_specs(layers):
    specs = [
        LayerSpec(kind=kind, units=units, return_sequences=i < len(layers) - 1)
        for i, (kind, units) in enumerate(layers)
    ]
    specs.append(LayerSpec(kind="dense", units=1))
    return tuple(specs)


GRADCHECK_NETS = [
    # (arch layers, steps, batch)
    ([("lstm", 1)], 2, 1),
    ([("lstm", 2)], 3, 2),
    ([("lstm", 4)], 4, 1),
    ([("lstm", 8)], 6, 2),
    ([("lstm", 6)], 5, 1),
    ([("lstm", 3)], 2, 2),
    ([("bilstm", 1)], 2, 1),
    ([("bilstm", 2)], 3, 2),
    ([("bilstm", 4)], 4, 1),
    ([("bilstm", 8)], 6, 1),
    ([("bilstm", 5)], 5, 2),
    ([("bilstm", 7)], 3, 1),
    ([("lstm", 4), ("lstm", 2)], 4, 2),
    ([("lstm", 8), ("lstm", 4)], 6, 1),
    ([("lstm", 3), ("lstm", 3)], 3, 1),
    ([("lstm", 5), ("lstm", 2)], 5, 2),
    ([("bilstm", 4), ("bilstm", 2)], 4, 1),
    ([("bilstm", 6), ("bilstm", 3)], 5, 1),
    ([("lstm", 4), ("bilstm", 3)], 4, 2),
    ([("bilstm", 5), ("lstm", 4)], 6, 1),
]


def test_gradient_correctness():
    """Analytic BPTT gradients match central finite differences (step
    1e-5) within 1e-4 relative error on 20 random small networks, in
    under 30 seconds."""
    start = time.monotonic()
    rng = np.random.default_rng(0)
    eps = 1e-5
    worst = 0.0
    for net_idx, (layers, steps, batch) in enumerate(GRADCHECK_NETS):
        model = NetworkModel.initialize(_mixed_specs(layers), input_width=1, seed=net_idx)
        inputs = rng.uniform(-1.0, 1.0, size=(batch, steps, 1))
        targets = rng.uniform(-1.0, 1.0, size=batch)

        _, cache = forward_batch(model, inputs)
        analytic = backward(model, (inputs, targets), cache)

        def loss():
            preds, _ = forward_batch(model, inputs)
            return mse_loss(preds, targets)

        for grad, (_, arr) in zip(analytic, model.parameters()):
            it = np.nditer(arr, flags=["multi_index"])
            while not it.finished:
                idx = it.multi_index
                saved = arr[idx]
                arr[idx] = saved + eps
                up = loss()
                arr[idx] = saved - eps
                down = loss()
                arr[idx] = saved
                numeric = (up - down) / (2.0 * eps)
                a = float(grad[idx])
                rel = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
                worst = max(worst, rel)
                it.iternext()
    elapsed = time.monotonic() - start
    assert worst < 1e-4, f"worst relative gradient error {worst:.3e}"
    assert elapsed < 30.0, f"gradient check took {elapsed:.1f}s"


# ------------------------------------------------------------ normalization


def test_normalization_round_trip():
    """denormalize(normalize(x)) reproduces 1000 random positive series
    within 1e-12 relative error; constant series are rejected."""
    rng = np.random.default_rng(1)
    for _ in range(1000):
        length = int(rng.integers(2, 400))
        scale = 10.0 ** rng.uniform(-3, 6)
        values = scale * (1.0 + rng.uniform(0.0, 2.0, size=length))
        params = NormalizationParams(minimum=float(values.min()), maximum=float(values.max()))
        back = denormalize(normalize(values, params), params)
        assert np.all(np.abs(back - values) <= 1e-12 * np.abs(values))
    with pytest.raises(PriceDataError, match="degenerate"):
        fit_normalizer(make_prices([55.5] * 10))
    with pytest.raises(PriceDataError, match="degenerate"):
        NormalizationParams(minimum=3.0, maximum=3.0)


# ------------------------------------------------------------------ windows


def test_sequence_builder_oracle():
    """All three window builders equal direct index arithmetic exactly
    for every n in 1..5 and every series length up to 20."""
    rng = np.random.default_rng(2)
    for n in range(1, 6):
        for length in range(n + 1, 21):
            series = rng.uniform(0.0, 1.0, size=length)
            scores = rng.uniform(-1.0, 1.0, size=length)
            count = length - n
            for mode, builder in (
                ("none", lambda s, sc: seq_plain(s, n)),
                ("current", lambda s, sc: seq_with_cur_sent(s, sc, n)),
                ("previous", lambda s, sc: seq_with_prev_sent(s, sc, n)),
            ):
                ds = builder(series, scores)
                assert len(ds) == count
                for j in range(count):
                    window = series[j : j + n]
                    if mode == "current":
                        window = np.append(window, scores[j + n])
                    elif mode == "previous":
                        window = np.append(window, scores[j + n - 1])
                    assert np.array_equal(ds.inputs[j, :, 0], window), (mode, n, length, j)
                    assert ds.targets[j] == series[j + n]


# ----------------------------------------------------------------- backtest


def _brute_force_trades(actuals, predictions, buy_t, sell_t, rate, capital):
    cash, units = capital, 0.0
    rows = []
    for i in range(1, len(actuals)):
        prev = actuals[i - 1]
        predicted = predictions[i]
        if (predicted - prev) / prev > buy_t and cash > 0:
            bought = cash * (1.0 - rate) / prev
            rows.append(("buy", i, prev, bought, cash * rate))
            units, cash = units + bought, 0.0
        elif (prev - predicted) / prev > sell_t and units > 0:
            rows.append(("sell", i, prev, units, units * prev * rate))
            cash, units = cash + units * prev * (1.0 - rate), 0.0
    return rows, cash, units


def test_backtester_oracle():
    """run_backtest equals a brute-force day-loop on 500 random markets
    to the last unit of currency, and reproduces both hand-computed
    ledgers (fee-free and 1% fee)."""
    rng = np.random.default_rng(2)
    for _ in range(500):
        length = int(rng.integers(2, 51))
        actuals = 100.0 * np.exp(np.cumsum(rng.normal(0.0, 0.05, size=length)))
        predictions = actuals * (1.0 + rng.normal(0.0, 0.04, size=length))
        cfg = StrategyConfig(
            buy_threshold=float(rng.uniform(0.001, 0.08)),
            sell_threshold=float(rng.uniform(0.001, 0.08)),
            tx_rate=float(rng.uniform(0.0, 0.04)),
            initial_capital=float(rng.uniform(500.0, 1e5)),
        )
        ledger = run_backtest(actuals, predictions, cfg)
        rows, cash, units = _brute_force_trades(
            [float(v) for v in actuals], [float(v) for v in predictions],
            cfg.buy_threshold, cfg.sell_threshold, cfg.tx_rate, cfg.initial_capital,
        )
        assert [(e.action, e.day, e.price, e.units, e.fee) for e in ledger.events] == rows
        assert ledger.final_state.cash == cash
        assert ledger.final_state.holdings == units
        assert ledger.final_value == cash + units * float(actuals[-1])

    # hand ledger, no fees: buy 10 units at 100, sell at 110, profit 100
    cfg = StrategyConfig(buy_threshold=0.05, sell_threshold=0.05, tx_rate=0.0, initial_capital=1000.0)
    ledger = run_backtest([100.0, 110.0, 100.0], [100.0, 110.0, 89.0], cfg)
    assert [(e.action, e.units) for e in ledger.events] == [("buy", 10.0), ("sell", 10.0)]
    assert ledger.final_value == 1100.0
    assert ledger.profit == 100.0

    # hand ledger, 1% fee each side: 9.9 units, proceeds 1078.11
    # (equalities up to decimal-to-binary conversion of the fee factor)
    cfg = StrategyConfig(buy_threshold=0.05, sell_threshold=0.05, tx_rate=0.01, initial_capital=1000.0)
    ledger = run_backtest([100.0, 110.0, 100.0], [100.0, 110.0, 89.0], cfg)
    assert ledger.events[0].units == pytest.approx(9.9, rel=1e-12)
    assert ledger.events[0].fee == pytest.approx(10.0, rel=1e-12)
    assert ledger.events[1].fee == pytest.approx(10.89, rel=1e-12)
    assert ledger.final_value == pytest.approx(1078.11, rel=1e-12)
    assert ledger.profit == pytest.approx(78.11, rel=1e-12)


# ------------------------------------------------------------------- splits


def test_split_fidelity():
    """A 585-day series divides into 497 training and 88 test days
    under the 0.85 chronological split."""
    assert split_sizes(585, 0.85) == (497, 88)


# ------------------------------------------------------------- autoregression


def test_autoregression_property():
    """The m-day rollout feeds predictions back into its own window: an
    echo-the-newest-value stub emits m copies of the seed tail, and
    m=1 reduces to a single forward pass of a real network."""
    stub = lambda seq: float(seq[-1, 0])
    out = pred_next_m_days(stub, [0.1, 0.5, 0.7], n=3, m=12)
    assert out.tolist() == [0.7] * 12

    model = NetworkModel.initialize(layer_specs("bilstm", (6,)), input_width=1, seed=1)
    seed_series = np.linspace(0.0, 1.0, 15)
    rollout = pred_next_m_days(model, seed_series, n=10, m=1)
    single, _ = network_forward(model, seed_series[-10:][:, None])
    assert rollout.shape == (1,)
    assert rollout[0] == single


# ------------------------------------------------------------- learnability


def test_learnability_bar():
    """A Bi-LSTM run on a noiseless 500-point sinusoid (n=10, lr=0.02,
    100 epochs, fixed seed) reaches test MAPE below 0.02 in under
    5 minutes."""
    start = time.monotonic()
    t = np.arange(500, dtype=np.float64)
    closes = 100.0 + 20.0 * np.sin(2.0 * np.pi * t / 25.0)
    cfg = RegimeConfig(
        regime="intraday", arch=layer_specs("bilstm", (10,)),
        n=10, lr=0.02, epochs=100, seed=0,
    )
    result = run_intraday(make_prices(closes), None, cfg)
    error = mape(result.actual, result.predicted)
    elapsed = time.monotonic() - start
    assert error < 0.02, f"test MAPE {error:.5f}"
    assert elapsed < 300.0, f"training took {elapsed:.0f}s"


# -------------------------------------------------------- sentiment benefit


def _sentiment_market(days=240, block=5, delta=0.025, sigma=0.003, rng_seed=7):
    """Block-persistent daily sentiment whose sign drives the next
    close: r_d = delta * s_d + noise."""
    rng = np.random.default_rng(rng_seed)
    scores = np.empty(days)
    sign = 1.0
    for i in range(0, days, block):
        scores[i : i + block] = sign * 0.8
        sign = -sign
    closes = np.empty(days)
    closes[0] = 100.0
    for d in range(1, days):
        closes[d] = closes[d - 1] * (1.0 + delta * scores[d] + rng.normal(0.0, sigma))
    return closes, scores


def test_sentiment_benefit_direction():
    """On a market where returns follow an injected sentiment signal,
    the sentiment-fed model beats the price-only model on test MAE in
    at least 4 of 5 seeds, in both evaluation regimes."""
    closes, scores = _sentiment_market()
    prices, sentiment = make_prices(closes), make_sentiment(scores)
    for regime in ("intraday", "one_day_ahead"):
        wins = 0
        for seed in range(5):
            results = {}
            for use_sentiment in (False, True):
                if use_sentiment:
                    mode = "current" if regime == "intraday" else "previous"
                    train_mode, test_mode = mode, mode
                else:
                    train_mode = test_mode = "none"
                cfg = RegimeConfig(
                    regime=regime, arch=layer_specs("lstm", (8,)),
                    n=5, lr=0.02, epochs=60, seed=seed,
                    sentiment_mode_train=train_mode, sentiment_mode_test=test_mode,
                )
                result = run_regime(prices, sentiment if use_sentiment else None, cfg)
                results[use_sentiment] = mae(result.actual, result.predicted)
            wins += results[True] < results[False]
        assert wins >= 4, f"{regime}: sentiment helped in only {wins}/5 seeds"


# -------------------------------------------------------------- determinism


def test_determinism():
    """Two runs of the full command pipeline with the same config and
    seed write byte-identical checkpoints, forecasts, ledgers, and
    reports."""
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as tmp:
        base = Path(tmp)
        prices = write_price_csv(base / "prices.csv", 100.0 + 20.0 * np.sin(np.arange(70) / 4.0))
        cfg_lstm = base / "lstm.cfg"
        cfg_lstm.write_text(
            f"asset = btc\nprices = {prices}\nregime = intraday\nmodel = lstm\n"
            "units = 4\nn = 3\nepochs = 2\nseed = 3\n",
            encoding="utf-8",
        )
        cfg_bilstm = base / "bilstm.cfg"
        cfg_bilstm.write_text(
            f"asset = btc\nprices = {prices}\nregime = intraday\nmodel = bilstm\n"
            "units = 3\nn = 3\nepochs = 2\nseed = 3\n",
            encoding="utf-8",
        )

        for tag in ("a", "b"):
            out = str(base / tag)
            assert cli_main(["train", "--config", str(cfg_lstm), "--out", out]) == 0
            assert cli_main(["predict", "--config", str(cfg_lstm), "--out", out,
                             "--checkpoint", f"{out}/lstm.ckpt"]) == 0
            assert cli_main(["backtest", "--config", str(cfg_lstm), "--out", out,
                             "--predictions", f"{out}/lstm_forecast.json"]) == 0
            assert cli_main(["compare", "--config", str(cfg_lstm),
                             "--config", str(cfg_bilstm), "--out", out]) == 0

        files_a = sorted(p.relative_to(base / "a") for p in (base / "a").rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(base / "b") for p in (base / "b").rglob("*") if p.is_file())
        assert files_a == files_b and files_a, "runs produced different file sets"
        assert {p.suffix for p in files_a} >= {".ckpt", ".json", ".csv"}
        for rel in files_a:
            assert (base / "a" / rel).read_bytes() == (base / "b" / rel).read_bytes(), rel


# ------------------------------------------------------------------ metrics


def test_metric_identities():
    """accuracy(mape(y, y)) is exactly 100, and a MAPE fraction of
    0.02317 converts to 97.68% accuracy at two decimals."""
    y = [3.0, 44.0, 5.5, 61.0]
    assert accuracy(mape(y, y)) == 100.0
    assert round(accuracy(0.02317), 2) == 97.68
