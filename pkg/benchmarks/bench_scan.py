#!/usr/bin/env python3
"""Benchmark the exact cosine scan: serial vs thread-partitioned blocks."""

import argparse
import time

import numpy as np

from trake.vector_index import VectorStore, search_topk


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, nargs="+", default=[10_000, 100_000, 500_000])
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--k", type=int, default=100)
    parser.add_argument("--workers", type=int, nargs="+", default=[1, 2, 4])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'rows':>10} " + "".join(f"{f'workers={w}':>14}" for w in args.workers))
    for rows in args.rows:
        raw = rng.normal(size=(rows, args.dim))
        raw /= np.linalg.norm(raw, axis=1)[:, None]
        store = VectorStore(np.arange(1, rows + 1, dtype=np.uint64), raw.astype(np.float32))
        query = rng.normal(size=args.dim)
        query /= np.linalg.norm(query)

        line = f"{rows:>10} "
        reference = None
        for workers in args.workers:
            times = []
            for _ in range(args.repeats):
                start = time.perf_counter()
                hits = search_topk(store, query, args.k, workers=workers)
                times.append(time.perf_counter() - start)
            ids = [h.keyframe_id for h in hits]
            if reference is None:
                reference = ids
            elif ids != reference:
                raise SystemExit(f"worker count {workers} changed the result order")
            line += f"{min(times) * 1000:>11.2f} ms"
        print(line)


if __name__ == "__main__":
    main()
