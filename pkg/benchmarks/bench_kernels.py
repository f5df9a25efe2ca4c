"""Compare the numba and numpy backends on the field kernels and the batch engine.

    python benchmarks/bench_kernels.py [--size N] [--repeat R]
"""

import argparse
import time

import numpy as np

from infocheck import kernels
from infocheck._accel import HAVE_NUMBA
from infocheck.gf2k import IRREDUCIBLE
from infocheck.icp import ProtocolParams
from infocheck.simnet import SessionConfig, run_batch


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--trials", type=int, default=100_000)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    if HAVE_NUMBA:
        kernels.warmup()
    gen = np.random.default_rng(0)

    print(f"{'case':<34}" + "".join(f"{b:>12}" for b in backends))
    for kappa in (8, 16, 64):
        poly = IRREDUCIBLE[kappa]
        hi = 1 << kappa
        a = gen.integers(0, hi, args.size, dtype=np.uint64, endpoint=False) if kappa < 64 \
            else gen.integers(0, 2**63, args.size, dtype=np.uint64)
        b = np.roll(a, 1)
        ref = kernels.gf_mul(a, b, kappa, poly, "numpy")
        row = []
        for be in backends:
            assert np.array_equal(kernels.gf_mul(a, b, kappa, poly, be), ref)
            row.append(best_of(lambda: kernels.gf_mul(a, b, kappa, poly, be), args.repeat))
        print(f"{f'gf_mul k={kappa} N={args.size}':<34}" + "".join(f"{t:>11.4f}s" for t in row))

    rows = args.size // 10
    coeffs = gen.integers(0, 256, (rows, 6), dtype=np.uint64)
    x = gen.integers(1, 256, (rows, 3), dtype=np.uint64)
    row = []
    for be in backends:
        row.append(best_of(lambda: kernels.poly_eval(coeffs, x, 8, IRREDUCIBLE[8], be), args.repeat))
    print(f"{f'poly_eval k=8 L=6 m=3 rows={rows}':<34}" + "".join(f"{t:>11.4f}s" for t in row))

    params = ProtocolParams.build(3, 4, kappa=8)
    seeds = np.arange(args.trials, dtype=np.uint64)
    for strategy, q in (("guessing", 1), ("forging", 5)):
        cfg = SessionConfig(params, strategy=strategy, q=q)
        row = []
        for be in backends:
            row.append(best_of(lambda: run_batch(cfg, seeds, backend=be), 1))
        print(f"{f'batch {strategy} q={q} N={args.trials}':<34}" + "".join(f"{t:>11.4f}s" for t in row))


if __name__ == "__main__":
    main()
