"""Time the compiled LSTM kernels against the numpy reference.

Runs lstm_forward and lstm_backward on pipeline-shaped workloads with
both backends and prints a speedup table, verifying agreement on each
shape first. Usage:

    python3 benchmarks/bench_kernels.py [--repeats 30]
"""

import argparse
import time

import numpy as np

from cryptocast.nn.kernels import reference

try:
    from cryptocast.nn.kernels import _lstm as compiled
except ImportError:
    compiled = None

# (label, batch, steps, input_dim, units) covering the stack shapes a
# default three-layer run actually sees, plus a tiny and a wide case
SHAPES = [
    ("tiny", 32, 5, 1, 8),
    ("layer0", 400, 11, 1, 50),
    ("layer1", 400, 11, 50, 30),
    ("layer2", 400, 11, 30, 20),
    ("wide", 128, 20, 64, 64),
]


def make_case(batch, steps, input_dim, units, rng):
    x = rng.standard_normal((batch, steps, input_dim))
    u = rng.standard_normal((input_dim, 4 * units)) * 0.2
    w = rng.standard_normal((units, 4 * units)) * 0.2
    b = rng.standard_normal(4 * units) * 0.1
    dh = rng.standard_normal((batch, steps, units))
    return x, u, w, b, dh


def bench(fn, repeats):
    fn()  # warm up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def check_agreement(case):
    x, u, w, b, dh = case
    ref = reference.lstm_forward(x, u, w, b)
    fast = compiled.lstm_forward(x, u, w, b)
    for r, f in zip(ref, fast):
        np.testing.assert_allclose(f, r, atol=1e-13)
    ref_g = reference.lstm_backward(x, u, w, *ref, dh)
    fast_g = compiled.lstm_backward(x, u, w, *fast, dh)
    for r, f in zip(ref_g, fast_g):
        np.testing.assert_allclose(f, r, atol=1e-11)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=30, help="timed repetitions per case")
    args = parser.parse_args()

    if compiled is None:
        raise SystemExit("compiled extension not built; reinstall with a C toolchain")

    rng = np.random.default_rng(0)
    header = f"{'shape':>8} {'b x t x d -> u':>18} {'pass':>8} {'python':>10} {'cython':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, batch, steps, input_dim, units in SHAPES:
        case = make_case(batch, steps, input_dim, units, rng)
        check_agreement(case)
        x, u, w, b, dh = case
        run = reference.lstm_forward(x, u, w, b)

        timings = {
            "forward": (
                bench(lambda: reference.lstm_forward(x, u, w, b), args.repeats),
                bench(lambda: compiled.lstm_forward(x, u, w, b), args.repeats),
            ),
            "backward": (
                bench(lambda: reference.lstm_backward(x, u, w, *run, dh), args.repeats),
                bench(lambda: compiled.lstm_backward(x, u, w, *run, dh), args.repeats),
            ),
        }
        dims = f"{batch}x{steps}x{input_dim} -> {units}"
        for pass_name, (t_py, t_cy) in timings.items():
            print(
                f"{label:>8} {dims:>18} {pass_name:>8} "
                f"{t_py * 1e3:>8.3f}ms {t_cy * 1e3:>8.3f}ms {t_py / t_cy:>7.2f}x"
            )


if __name__ == "__main__":
    main()
