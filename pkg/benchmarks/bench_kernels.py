"""Compare the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--iterations N]

Times the three hot kernels on word-sized operands (where the compiled
unsigned 128-bit path applies) and on bignum operands (where both
backends fall through to Python integers, so the gap should vanish).
"""

import argparse
import random
import time

from ccagames import _kernels_py

try:
    from ccagames import _kernels as compiled
except ImportError:
    compiled = None


def make_cases(rng, bits, count):
    cases = []
    for _ in range(count):
        n = rng.randrange(2, 1 << bits) | 1
        cases.append((rng.randrange(n), rng.randrange(n), n))
    return cases


def bench(label, func, cases, repeat=3):
    best = min(
        timeit_once(func, cases) for _ in range(repeat)
    )
    rate = len(cases) / best
    print(f"  {label:<28} {best * 1e3:8.2f} ms  ({rate:,.0f} ops/s)")
    return best


def timeit_once(func, cases):
    start = time.perf_counter()
    for case in cases:
        func(*case)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iterations", type=int, default=20_000)
    args = parser.parse_args()
    rng = random.Random(0)

    backends = [("pure-python", _kernels_py)]
    if compiled is not None:
        backends.insert(0, ("compiled", compiled))
    else:
        print("compiled extension not available; benchmarking fallback only")

    suites = [
        ("mul, 60-bit operands", "mul", make_cases(rng, 60, args.iterations)),
        ("mul, 90-bit operands", "mul", make_cases(rng, 90, args.iterations)),
        (
            "pow_leaky, 60-bit n, 32-bit e",
            "pow_leaky",
            [
                (base, rng.randrange(1 << 32), n)
                for base, _, n in make_cases(rng, 60, args.iterations // 20)
            ],
        ),
        (
            "pow_ladder, 60-bit n, w=32",
            "pow_ladder",
            [
                (base, rng.randrange(1 << 32), n, 32)
                for base, _, n in make_cases(rng, 60, args.iterations // 20)
            ],
        ),
        (
            "pow_ladder, 90-bit n, w=64",
            "pow_ladder",
            [
                (base, rng.randrange(1 << 64), n, 64)
                for base, _, n in make_cases(rng, 90, args.iterations // 40)
            ],
        ),
    ]

    for title, func_name, cases in suites:
        print(f"{title} ({len(cases)} calls):")
        times = {}
        for label, module in backends:
            times[label] = bench(label, getattr(module, func_name), cases)
        if len(times) == 2:
            print(f"  speedup: {times['pure-python'] / times['compiled']:.2f}x")
        print()


if __name__ == "__main__":
    main()
