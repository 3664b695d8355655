"""Micro- and end-to-end benchmark of the compiled kernels against the
pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py
"""
import math
import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
from saddlesvm import _core_py  # noqa: E402

try:
    from saddlesvm import _core as _core_cy
except ImportError:
    _core_cy = None


def bench(fn, *args, repeat=2000):
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat * 1e6  # microseconds


def micro():
    rng = np.random.default_rng(0)
    n = 4096
    log_cur = np.log(rng.dirichlet(np.ones(n)))
    ip = rng.normal(size=n)
    xrow = rng.normal(size=n)
    out = np.empty(n)
    lin = rng.dirichlet(np.ones(n))
    v = rng.normal(size=1024)

    cases = {
        "fwht_inplace(1024)": lambda m: m.fwht_inplace(v.copy()),
        "extrap_dot(4096)": lambda m: m.extrap_dot(xrow, lin, lin, 0.7),
        "phi_log_weights(4096)": lambda m: m.phi_log_weights(
            log_cur, ip, xrow, 0.9, 0.05, 0.3, 1.0, out),
        "sum_exp(4096)": lambda m: m.sum_exp(log_cur),
        "cap_stats(4096)": lambda m: m.cap_stats(lin, 1e-3),
        "ip_update(4096)": lambda m: m.ip_update(ip, xrow, 1e-3),
    }
    print(f"{'kernel':<24}{'python (us)':>14}{'cython (us)':>14}{'speedup':>10}")
    for name, call in cases.items():
        t_py = bench(call, _core_py, repeat=500)
        if _core_cy is None:
            print(f"{name:<24}{t_py:>14.2f}{'n/a':>14}{'n/a':>10}")
            continue
        t_cy = bench(call, _core_cy, repeat=500)
        print(f"{name:<24}{t_py:>14.2f}{t_cy:>14.2f}{t_py / t_cy:>9.1f}x")


def end_to_end():
    iris = os.path.join(os.path.dirname(__file__), "..",
                        "tests", "data", "iris.libsvm")
    script = (
        "import os, time\n"
        "from saddlesvm.data_model import load_libsvm\n"
        "from saddlesvm import saddle_core as sc\n"
        "from saddlesvm.backend import BACKEND\n"
        f"data = load_libsvm({iris!r})\n"
        "t0 = time.perf_counter()\n"
        "for seed in range(5):\n"
        "    sc.solve(data, sc.SolveConfig(epsilon=1e-3, beta=0.1, seed=seed))\n"
        "print(f'{BACKEND}: {(time.perf_counter()-t0)/5*1e3:.1f} ms per solve')\n"
    )
    print("\nend-to-end (iris hard margin, mean of 5 solves):")
    for which in ("cython", "python"):
        env = dict(os.environ, SADDLESVM_BACKEND=which)
        out = subprocess.run([sys.executable, "-c", script], env=env,
                             capture_output=True, text=True)
        print(" ", (out.stdout.strip() or out.stderr.strip()))


if __name__ == "__main__":
    micro()
    end_to_end()
