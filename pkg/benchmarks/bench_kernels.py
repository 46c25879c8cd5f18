"""Benchmark the numba kernels against their pure-numpy twins.

Runs the summary-feature kernel and both decision-tree split kernels on a
range of sizes, reports per-call times and speedups, and cross-checks that
the two backends agree.  Usage:

    python3 benchmarks/bench_kernels.py [--repeats 7] [--seed 0]

The numba timings exclude compilation: each kernel is called once to warm
up (compiled artifacts are also cached on disk across runs).
"""

from __future__ import annotations

import argparse
from time import perf_counter

import numpy as np

from polydeclare import _cart_np
from polydeclare.features import compute22_numba, compute22_numpy

try:
    from polydeclare import _cart_nb
except ImportError:
    _cart_nb = None


def best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = perf_counter()
        fn()
        best = min(best, perf_counter() - started)
    return best


def report(label: str, numpy_s: float, numba_s: float | None) -> None:
    if numba_s is None:
        print(f"{label:<44} numpy {numpy_s * 1e6:9.1f} us   numba        n/a")
        return
    print(
        f"{label:<44} numpy {numpy_s * 1e6:9.1f} us   "
        f"numba {numba_s * 1e6:9.1f} us   x{numpy_s / numba_s:5.1f}"
    )


def bench_features(rng: np.random.Generator, repeats: int) -> None:
    for n in (50, 200, 1_000, 5_000):
        x = np.cumsum(rng.normal(0.0, 1.0, n))
        numba_s = None
        if compute22_numba is not None:
            got = np.asarray(compute22_numba(x))  # warm-up + agreement check
            np.testing.assert_allclose(got, compute22_numpy(x), atol=1e-6)
            numba_s = best_of(lambda: compute22_numba(x), repeats)
        report(f"summary features, length {n}", best_of(lambda: compute22_numpy(x), repeats), numba_s)


def bench_numeric_split(rng: np.random.Generator, repeats: int) -> None:
    for n in (1_000, 10_000, 100_000):
        values = rng.normal(0.0, 1.0, n)
        labels = rng.integers(0, 3, n)
        numba_s = None
        if _cart_nb is not None:
            got = _cart_nb.best_numeric_split(values, labels, 3)
            want = _cart_np.best_numeric_split(values, labels, 3)
            assert got == want, (got, want)
            numba_s = best_of(lambda: _cart_nb.best_numeric_split(values, labels, 3), repeats)
        report(
            f"numeric split search, {n} rows",
            best_of(lambda: _cart_np.best_numeric_split(values, labels, 3), repeats),
            numba_s,
        )


def bench_ternary_split(rng: np.random.Generator, repeats: int) -> None:
    for n, m in ((2_000, 50), (20_000, 200)):
        frame = rng.integers(-1, 2, size=(n, m)).astype(np.int8)
        y = rng.integers(0, 4, n)
        onehot = np.zeros((n, 4), dtype=np.int64)
        onehot[np.arange(n), y] = 1
        numba_s = None
        if _cart_nb is not None:
            g_nb, t_nb, v_nb = _cart_nb.best_ternary_split(frame, onehot)
            g_np, t_np, v_np = _cart_np.best_ternary_split(frame, onehot)
            assert np.array_equal(v_nb, v_np)
            assert np.array_equal(g_nb[v_np], g_np[v_np]) and np.array_equal(t_nb[v_np], t_np[v_np])
            numba_s = best_of(lambda: _cart_nb.best_ternary_split(frame, onehot), repeats)
        report(
            f"ternary split search, {n}x{m} frame",
            best_of(lambda: _cart_np.best_ternary_split(frame, onehot), repeats),
            numba_s,
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7, help="best-of-N timing (default 7)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    if compute22_numba is None or _cart_nb is None:
        print("note: numba backend unavailable (POLYDECLARE_NO_NUMBA=1 or numba missing)")
    bench_features(rng, args.repeats)
    bench_numeric_split(rng, args.repeats)
    bench_ternary_split(rng, args.repeats)


if __name__ == "__main__":
    main()
