"""Benchmark: compiled marching core vs the pure-Python (numpy) fallback.

The memory convolution is O(N^2) per trajectory and dominates every shoot,
so this times full marches of the reference classical run (alpha=0.9,
tau=0.5) at several grid sizes.

Run:  python3 benchmarks/bench_core.py
"""

import math
import time

import numpy as np

from fractw import IntegrateOptions, WaveConfig
from fractw import _core, _core_py  # type: ignore[attr-defined]
from fractw.charroots import positive_root_left
from fractw.fracderiv import FracParams, TailSpec, tail_contribution
from fractw.quadweights import product_weights


def _march_args(n_max: int, dx: float, tau: float = 0.5, alpha: float = 0.9):
    cfg = WaveConfig.from_states(1.0, -0.6, alpha)
    lam = positive_root_left(tau, 1.0, cfg.h_prime_minus, alpha)
    eps = 1e-4
    xi0 = math.log(eps) / lam
    fp = FracParams.for_order(alpha)
    beta = 1.0 - alpha
    k = np.arange(n_max + 1, dtype=float)
    tail = np.asarray(tail_contribution(TailSpec(-1.0, lam), xi0, xi0 + k * dx, fp))
    pow_arr = fp.d_alpha / beta * (k * dx) ** beta
    body, edge, newest = product_weights(beta, n_max)
    kq = fp.d_alpha / beta * dx ** (beta + 1.0)
    return (cfg.phi_minus - eps, -eps * lam, tau, dx, n_max, False,
            cfg.c, cfg.phi_minus, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            tail, pow_arr, body, edge, kq * newest, kq, -10.0)


def main() -> None:
    print(f"{'n_max':>8} {'cython [s]':>12} {'python [s]':>12} {'speedup':>9}")
    for n_max in (5000, 20000, 50000):
        args = _march_args(n_max, dx=500.0 / n_max)
        best = {}
        for name, mod in (("cython", _core), ("python", _core_py)):
            times = []
            for _ in range(3):
                t0 = time.perf_counter()
                out = mod.march(*args)
                times.append(time.perf_counter() - t0)
            best[name] = min(times)
            ref = out
        # agreement guard: the two cores must produce the same trajectory
        phi_c, *_ = _core.march(*args)
        phi_p, *_ = _core_py.march(*args)
        assert np.max(np.abs(phi_c - phi_p)) < 1e-12
        print(f"{n_max:>8} {best['cython']:>12.3f} {best['python']:>12.3f} "
              f"{best['python'] / best['cython']:>8.1f}x")


if __name__ == "__main__":
    main()
