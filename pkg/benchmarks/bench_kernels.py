"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Each kernel runs on the same inputs under every available backend, and the
outputs are checked for equality before any timing is reported.
"""
import argparse
import time

import numpy as np

from singseries import kernels
from singseries.empirical import MonteCarloConfig, _MonteCarloTask, _PatternTask, pattern_count
from singseries.numeric import primes_upto


def _cases(scale):
    n_sieve = int(2_000_000 * scale)
    lo = 10 ** 9
    base = primes_upto(int((lo + n_sieve) ** 0.5) + 1)
    yield "sieve_segment", f"[1e9, 1e9+{n_sieve})", lambda m: m.sieve_segment(lo, lo + n_sieve, base)

    rng = np.random.default_rng(1)
    vals = rng.integers(0, 2 ** 63, int(20_000 * scale), dtype=np.uint64) * np.uint64(2) + np.uint64(1)
    yield "is_prime_batch", f"{len(vals)} odd 64-bit", lambda m: m.is_prime_batch(vals)

    k, h = 3, max(3, int(150 * scale))
    task = _PatternTask(k, h, 1000)
    stop = pattern_count(k, h)
    args = (task.k, task.h, 0, stop, task.spf, task.small_primes, task.small_local, task.corr, task.base)
    yield "pattern_sweep", f"k={k} h={h} ({stop} patterns)", lambda m: m.pattern_sweep(*args)

    n = int(20_000 * scale)
    mc = _MonteCarloTask(MonteCarloConfig(2, 1000, n, 12345))
    yield "mc_sample", f"k=2 P=1000 n={n}", lambda m: m.mc_sample(2, 12345, 0, n, mc.primes, mc.logtab)


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply every problem size")
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; timing the Python fallback only")
    names = list(backends)
    print(f"{'kernel':<16}{'input':<30}" + "".join(f"{n + ' (s)':>14}" for n in names) + f"{'speedup':>10}")
    for kernel, label, fn in _cases(args.scale):
        times, outs = {}, {}
        for name in names:
            times[name], outs[name] = _best(lambda: fn(backends[name]), args.repeat)
        if len(outs) == 2 and not _same(outs["python"], outs["cython"]):
            raise SystemExit(f"{kernel}: backends disagree")
        speedup = f"{times['python'] / times['cython']:>9.1f}x" if "cython" in times else ""
        print(f"{kernel:<16}{label:<30}" + "".join(f"{times[n]:>14.4f}" for n in names) + speedup)


if __name__ == "__main__":
    main()
