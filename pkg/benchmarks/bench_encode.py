"""Time the compiled kernels against the numpy fallbacks.

Generates a synthetic address batch, runs feature encoding and the entropy
screen through both implementations, checks they agree, and prints a small
table. Run from the repository root:

    python3 benchmarks/bench_encode.py --rows 200000
"""

import argparse
import time

import numpy as np

from burnscan import _kernels
from burnscan.features import FEATURE_WIDTH, codes_matrix
from burnscan.synth import make_corpus


def timed(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return result, best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=100_000,
                        help="addresses in the benchmark batch")
    parser.add_argument("--seed", type=int, default=2)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    # a real mixed corpus, tiled up to the requested row count
    base = make_corpus(args.seed, n_regular=20_000, n_burn=600)
    addrs = (base.addresses * (args.rows // len(base.addresses) + 1))[: args.rows]
    codes = codes_matrix(addrs)
    print(f"batch: {len(addrs)} addresses, kernels: {_kernels.kernel_status()['active']}")

    rows = []

    def bench(name, compiled, fallback, make_args):
        if compiled is not None:
            compiled(*make_args())  # compile before timing
            got_c, t_c = timed(compiled, *make_args(), repeats=args.repeats)
        else:
            got_c, t_c = None, None
        got_n, t_n = timed(fallback, *make_args(), repeats=args.repeats)
        if got_c is not None:
            a = got_c if isinstance(got_c, np.ndarray) else make_args()[1]
            if name == "encode":
                assert (got_c == got_n).all(), "kernel outputs diverge"
            else:
                assert np.abs(got_c - got_n).max() < 1e-12, "entropy diverges"
        rows.append((name, t_c, t_n))

    bench(
        "encode",
        _kernels.fill_feature_rows_numba,
        _kernels.fill_feature_rows_numpy,
        lambda: (codes, np.zeros((len(addrs), FEATURE_WIDTH), np.uint8)),
    )
    bench(
        "entropy",
        _kernels.entropy_rows_numba,
        _kernels.entropy_rows_numpy,
        lambda: (codes,),
    )

    print(f"{'kernel':<10}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, t_c, t_n in rows:
        if t_c is None:
            print(f"{name:<10}{'n/a':>12}{t_n:>11.3f}s{'':>10}")
        else:
            print(f"{name:<10}{t_c:>11.3f}s{t_n:>11.3f}s{t_n / t_c:>9.1f}x")
    if _kernels.NUMBA_AVAILABLE:
        print("outputs identical across implementations")
    else:
        print(f"numba unavailable or disabled ({_kernels.DISABLE_ENV}); "
              "fallback timings only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
