"""Compare the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--d D] [--m M]

For each kernel, prints the best-of-N wall time for both backends, the
speedup, and the largest output difference between them. Compilation is
triggered by a warm-up call and is not timed.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from osq.gates import displacement, sum_permutation, sum_via_kerr
from osq.kernels import NUMBA_KERNELS, NUMPY_KERNELS


def best_time(fn, args, repeat):
    fn(*args)  # warm-up (numba compiles here)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases(d, m, rng):
    n = d**m
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    psi /= np.linalg.norm(psi)
    perm, phases = sum_permutation(d).permutation
    probs = np.abs(psi) ** 2
    return {
        "apply_dense": (psi, d, m, (m - 1,), displacement(d, 0.7 + 0.2j).matrix),
        "apply_diagonal": (psi, d, m, (0, m - 1), sum_via_kerr(d).diagonal),
        "apply_permutation": (psi, d, m, (0, 1), perm, phases),
        "marginal_probs": (psi, d, m, m // 2),
        "sample_index": (probs, 0.6180339887),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--d", type=int, default=16)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"register: d={args.d}, m={args.m} ({args.d ** args.m} amplitudes), best of {args.repeat}")
    print(f"{'kernel':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>12}")
    for name, call_args in cases(args.d, args.m, rng).items():
        t_np = best_time(NUMPY_KERNELS[name], call_args, args.repeat)
        t_nb = best_time(NUMBA_KERNELS[name], call_args, args.repeat)
        diff = np.max(np.abs(np.asarray(NUMPY_KERNELS[name](*call_args))
                             - np.asarray(NUMBA_KERNELS[name](*call_args))))
        print(f"{name:<20}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.2f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
