"""Compare the compiled and numpy miner kernels on random token strings.

    python benchmarks/bench_miner.py --sizes 16 18 20 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from autotrace.miner import available_backends, find_repeats, get_kernels


def time_backend(name: str, s: np.ndarray, min_len: int, repeat: int) -> float:
    kernels = get_kernels(name)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        find_repeats(s, min_len, kernels)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv: list[str] | None = None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[12, 14, 16, 18], help="log2 of string length")
    p.add_argument("--alphabet", type=int, default=1 << 16)
    p.add_argument("--min-length", type=int, default=25)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    backends = available_backends()
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>9} " + " ".join(f"{b + ' s':>12}" for b in backends) + "   ratio")
    for k in args.sizes:
        s = rng.integers(0, args.alphabet, size=1 << k, dtype=np.int64)
        times = {b: time_backend(b, s, args.min_length, args.repeat) for b in backends}
        row = f"{1 << k:>9} " + " ".join(f"{times[b]:>12.4f}" for b in backends)
        if "compiled" in times:
            row += f"   {times['python'] / times['compiled']:5.1f}x"
        print(row)


if __name__ == "__main__":
    main()
