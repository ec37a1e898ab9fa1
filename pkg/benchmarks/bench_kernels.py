"""Compare the jit-compiled sweep kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py
The fallback is what you get with NISYS_NO_NUMBA=1; here both paths are
timed in-process. The jit path is warmed up first so compilation time is
not counted.
"""

import time

import numpy as np

from nisys._kernels import (_eval_grid_numpy, _sweep_eigmin_numpy, backend,
                            eval_grid, sweep_eigmin)


def stable_system(rng, n, m):
    A = rng.standard_normal((n, n))
    A = A - (np.abs(np.linalg.eigvals(A).real).max() + 1.0) * np.eye(n)
    return A, rng.standard_normal((n, m)), rng.standard_normal((m, n)), \
        rng.standard_normal((m, m))


def bench(fn, *args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    ws = np.geomspace(1e-3, 1e3, 2000)
    print(f"active backend: {backend()}")
    if backend() != "numba":
        print("numba unavailable or disabled; timing the numpy path only\n")
    print(f"{'n':>4} {'m':>3} {'kernel':>12} {'numpy [ms]':>11} "
          f"{'jit [ms]':>10} {'speedup':>8}")
    for n, m in ((1, 1), (4, 2), (8, 2), (20, 1), (40, 4)):
        A, B, C, D = stable_system(rng, n, m)
        # warm-up compiles the jit path
        sweep_eigmin(A, B, C, D, ws[:4], mode=0)
        eval_grid(A, B, C, D, ws[:4])
        for label, jit_fn, np_fn, extra in (
                ("sweep_eigmin", sweep_eigmin, _sweep_eigmin_numpy, (0,)),
                ("eval_grid", eval_grid, _eval_grid_numpy, ())):
            t_np = bench(np_fn, A, B, C, D, ws, *extra)
            if backend() == "numba":
                t_jit = bench(jit_fn, A, B, C, D, ws, *extra)
                print(f"{n:>4} {m:>3} {label:>12} {1e3 * t_np:>11.2f} "
                      f"{1e3 * t_jit:>10.2f} {t_np / t_jit:>7.1f}x")
            else:
                print(f"{n:>4} {m:>3} {label:>12} {1e3 * t_np:>11.2f} "
                      f"{'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
