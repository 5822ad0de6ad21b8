"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Times the three slot kernels on the shapes the hierarchy expansions hit,
plus one end-to-end expansion. Run:

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import importlib
import os
import time
import timeit

import numpy as np


def rand(dim, rng):
    return np.ascontiguousarray(
        rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))


def bench_kernels(repeat):
    from bbgky_lab import kernels

    impls = kernels.backends()
    rng = np.random.default_rng(0)
    cases = [
        ("embed  d=2 k=1->n=3", "embed", (rand(2, rng), (1,), 3, 2)),
        ("embed  d=2 k=2->n=4", "embed", (rand(4, rng), (0, 2), 4, 2)),
        ("embed  d=2 k=3->n=6", "embed", (rand(8, rng), (1, 3, 5), 6, 2)),
        ("ptrace d=2 n=3->1", "ptrace", (rand(8, rng), (0,), 3, 2)),
        ("ptrace d=2 n=4->2", "ptrace", (rand(16, rng), (1, 2), 4, 2)),
        ("ptrace d=2 n=6->2", "ptrace", (rand(64, rng), (0, 3), 6, 2)),
        ("permute d=2 n=4", "permute", (rand(16, rng), (2, 0, 3, 1), 4, 2)),
        ("permute d=2 n=6", "permute", (rand(64, rng), (5, 0, 3, 1, 4, 2), 6, 2)),
    ]
    print(f"{'case':24s}" + "".join(f"{name:>12s}" for name in impls) +
          f"{'speedup':>10s}")
    for label, fn_name, args in cases:
        per_impl = {}
        for name, impl in impls.items():
            fn = getattr(impl, fn_name)
            n_calls = 2000
            best = min(timeit.repeat(lambda: fn(*args), number=n_calls,
                                     repeat=repeat))
            per_impl[name] = best / n_calls * 1e6  # microseconds per call
        line = f"{label:24s}" + "".join(f"{per_impl[n]:11.2f}u" for n in impls)
        if len(per_impl) == 2:
            line += f"{per_impl['pure'] / per_impl['accel']:9.2f}x"
        print(line)


def bench_expansion(repeat):
    """End-to-end: one dual-route solve at three particles per backend."""
    results = {}
    for backend in ("pure", "accel"):
        os.environ["BBGKY_LAB_KERNELS"] = backend
        for mod in list(importlib.sys.modules):
            if mod.startswith("bbgky_lab"):
                del importlib.sys.modules[mod]
        try:
            from bbgky_lab.config import (config_from_dict, default_config_dict,
                                          make_system, random_sequence)
            from bbgky_lab.hierarchy import (marginal_correlation,
                                             solve_nonlinear_bbgky)
            from bbgky_lab.sequences import exp_annihilation
        except ImportError:
            continue
        cfg = config_from_dict(default_config_dict(n_max=3, seed=7))
        g0 = random_sequence(cfg, "correlation")
        G0 = exp_annihilation(g0, +1)

        def run():
            sys_ = make_system(cfg)
            for t in (0.1, 0.5, 1.0):
                memo = {}
                for s in (1, 2, 3):
                    marginal_correlation(sys_, g0, s, t, memo)
                    solve_nonlinear_bbgky(sys_, G0, s, t)

        best = min(timeit.repeat(run, number=1, repeat=repeat))
        results[backend] = best
        print(f"dual-route solve, n_max=3 ({backend}): {best * 1e3:8.1f} ms")
    if len(results) == 2:
        print(f"expansion speedup: {results['pure'] / results['accel']:.2f}x")
    os.environ.pop("BBGKY_LAB_KERNELS", None)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    t0 = time.time()
    bench_kernels(args.repeat)
    print()
    bench_expansion(args.repeat)
    print(f"\ntotal benchmark time: {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
