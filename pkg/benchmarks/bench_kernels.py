"""Benchmark the compiled kernels against the numpy reference.

Run:  python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from occert import _kernels_py as kpy
from occert import certify as ct
from occert import curvature as cv
from occert import hermitian as hm
from occert.rng import make_rng

try:
    from occert import _kernels_cy as kcy
except ImportError:
    kcy = None


def _time(fn, args, repeat):
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=400)
    opts = parser.parse_args()

    rng = make_rng(0)
    R = np.ascontiguousarray(cv.random_curvature(rng))
    J = np.ascontiguousarray(hm.random_orthogonal_complex_structure(rng).J)
    vs = [rng.normal(size=6) for _ in range(4)]

    cases = [
        ("ricci_star_matrix", (R, J)),
        ("refute_value", (R, J)),
        ("refute_value_and_grad", (R, J, 1e-5)),
        ("quad_value", (R, *vs)),
        ("quad_value_and_grads", (R, *vs)),
    ]
    print("%-24s %12s %12s %9s" % ("kernel", "python [us]", "cython [us]", "speedup"))
    for name, args in cases:
        t_py = _time(getattr(kpy, name), args, max(opts.repeat // 10, 5))
        if kcy is None:
            print("%-24s %12.1f %12s %9s" % (name, t_py * 1e6, "n/a", "n/a"))
            continue
        t_cy = _time(getattr(kcy, name), args, opts.repeat)
        print("%-24s %12.1f %12.1f %8.1fx"
              % (name, t_py * 1e6, t_cy * 1e6, t_py / t_cy))

    # end-to-end effect on the refutation search
    t0 = time.perf_counter()
    ct.refute_P(-cv.kulkarni_nomizu_square(),
                ct.SearchConfig(multistarts=16, seed=1))
    print("\nrefute_P (16 starts, active backend): %.2f s"
          % (time.perf_counter() - t0))


if __name__ == "__main__":
    main()
