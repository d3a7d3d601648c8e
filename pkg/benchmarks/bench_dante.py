#!/usr/bin/env python3
"""Benchmark the alignment kernel backends against each other.

The compiled kernel and the numpy fallback produce bit-identical results;
this script measures how far apart they are in wall-clock time, and how both
scale with span length. The literal O(N*L^2) recurrence is included at small
sizes for contrast.
"""

import argparse
import time

import numpy as np

from trake._kernels import BACKEND, available_backends
from trake.catalog import VideoSpan
from trake.dante import DanteParams, dante_naive


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--events", type=int, default=5, help="number of event rows N")
    parser.add_argument(
        "--lengths",
        type=int,
        nargs="+",
        default=[1_000, 10_000, 100_000, 1_000_000],
        help="span lengths L to measure",
    )
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--lam", type=float, default=0.001)
    parser.add_argument("--naive-limit", type=int, default=3_000,
                        help="run the quadratic reference up to this L")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    backends = available_backends()
    print(f"active backend: {BACKEND}; comparing: {', '.join(backends)}")
    header = f"{'L':>10} " + "".join(f"{name:>14}" for name in backends) + f"{'naive':>14}"
    print(header)
    print("-" * len(header))

    for length in args.lengths:
        s = np.ascontiguousarray(rng.uniform(-1, 1, size=(args.events, length)))
        row = f"{length:>10} "
        results = {}
        for name, kernel in backends.items():
            dt = best_of(lambda: kernel(s, args.lam), args.repeats)
            results[name] = kernel(s, args.lam)
            row += f"{dt * 1000:>11.2f} ms"
        if length <= args.naive_limit:
            span = VideoSpan("bench", 1, length)
            dt = best_of(
                lambda: dante_naive(s, span, DanteParams(lam=args.lam)), max(1, args.repeats // 2)
            )
            row += f"{dt * 1000:>11.2f} ms"
        else:
            row += f"{'skipped':>14}"
        print(row)

        scores = {name: out[0] for name, out in results.items()}
        if len(set(scores.values())) > 1:
            raise SystemExit(f"backends disagree at L={length}: {scores}")

    print("\nper-cell cost (L = max measured):")
    s = np.ascontiguousarray(rng.uniform(-1, 1, size=(args.events, max(args.lengths))))
    for name, kernel in backends.items():
        dt = best_of(lambda: kernel(s, args.lam), args.repeats)
        cells = args.events * max(args.lengths)
        print(f"  {name:>8}: {dt / cells * 1e9:.2f} ns/cell")


if __name__ == "__main__":
    main()
