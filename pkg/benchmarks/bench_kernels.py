"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--trials 50]

Reports per-call times for the three kernels at desk and Table-1 sizes, and
wall time for a short end-to-end trial batch under each backend.
"""
import argparse
import timeit

import numpy as np

from irsmatch import _backend
from irsmatch.config import PRESETS
from irsmatch.harness import run_trials


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def kernel_cases(k, m, n):
    rng = np.random.default_rng(0)
    h = crandn(rng, k, m)
    gram = h @ h.conj().T
    phasors = np.exp(1j * (-np.pi + 2 * np.pi * np.arange(4) / 4))
    f, g_col = crandn(rng, n), crandn(rng, n)
    composite = h + 0.1 * crandn(rng, k, m)
    powers = np.full(k, 2.5)
    return {
        "gauss_solve": lambda kern: kern.gauss_solve(gram, h, 1e-12),
        "greedy_phases": lambda kern: kern.greedy_phases(f, g_col, phasors),
        "zf_rates": lambda kern: kern.zf_rates(h, composite, powers, 1e-11),
    }


def best_time(fn, number, repeat):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--trials", type=int, default=50)
    args = ap.parse_args(argv)

    backends = _backend.available()
    if "cython" not in backends:
        print("compiled extension not built; only the python fallback is available")
    previous = _backend.name

    print(f"{'kernel':<14} {'size':<12}" + "".join(f"{b + ' (us)':>16}" for b in backends) + f"{'speedup':>10}")
    for label, (k, m, n) in (("desk", (4, 4, 16)), ("table1", (8, 8, 50))):
        for kname, call in kernel_cases(k, m, n).items():
            times = {}
            for b in backends:
                _backend.set_backend(b)
                kern = _backend.kernels
                times[b] = best_time(lambda: call(kern), 2000, args.repeat) * 1e6
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{kname:<14} {label:<12}" + "".join(f"{times[b]:>16.2f}" for b in backends) + f"{speed:>9.1f}x")

    print()
    for label in ("desk", "table1"):
        cfg = PRESETS[label].replace(trials=args.trials)
        line = f"{label} {args.trials} trials:"
        for b in backends:
            _backend.set_backend(b)
            t = min(timeit.repeat(lambda: run_trials(cfg), number=1, repeat=max(1, args.repeat // 2)))
            line += f"  {b} {t:.2f} s"
        print(line)
    _backend.set_backend(previous)


if __name__ == "__main__":
    main()
