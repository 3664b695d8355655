"""Agreement between the compiled kernels and the pure-Python fallback."""
import math

import numpy as np
import pytest

from saddlesvm import _core_py
from saddlesvm import backend

cython_core = pytest.importorskip("saddlesvm._core")


def test_compiled_backend_is_active_by_default():
    assert backend.BACKEND in ("cython", "python")


@pytest.mark.parametrize("n", [2, 8, 64, 256])
def test_fwht_agreement(n):
    rng = np.random.default_rng(n)
    v = rng.normal(size=n)
    a, b = v.copy(), v.copy()
    cython_core.fwht_inplace(a)
    _core_py.fwht_inplace(b)
    assert np.array_equal(a, b)


def test_extrap_dot_agreement():
    rng = np.random.default_rng(1)
    x = rng.normal(size=31)
    cur = rng.dirichlet(np.ones(31))
    prev = rng.dirichlet(np.ones(31))
    a = cython_core.extrap_dot(x, cur, prev, 0.7)
    b = _core_py.extrap_dot(x, cur, prev, 0.7)
    assert a == pytest.approx(b, rel=1e-15)


def test_phi_and_normalizer_agreement():
    rng = np.random.default_rng(2)
    n = 23
    log_cur = np.log(rng.dirichlet(np.ones(n)))
    ip = rng.normal(size=n)
    xrow = rng.normal(size=n)
    out_c = np.empty(n)
    out_p = np.empty(n)
    cython_core.phi_log_weights(log_cur, ip, xrow, 0.9, 0.05, 0.3, 1.0, out_c)
    _core_py.phi_log_weights(log_cur, ip, xrow, 0.9, 0.05, 0.3, 1.0, out_p)
    assert np.allclose(out_c, out_p, atol=1e-15)
    zc = cython_core.sum_exp(out_c)
    zp = _core_py.sum_exp(out_p)
    assert zc == pytest.approx(zp, rel=1e-14)
    lin_c = np.empty(n)
    lin_p = np.empty(n)
    cython_core.finish_weights(out_c, math.log(zc), lin_c)
    _core_py.finish_weights(out_p, math.log(zp), lin_p)
    assert np.allclose(lin_c, lin_p, atol=1e-15)


def test_cap_kernels_agreement():
    rng = np.random.default_rng(3)
    n, nu = 17, 0.11
    lin = rng.dirichlet(np.ones(n))
    lw = np.log(lin)
    sc, oc = cython_core.cap_stats(lin, nu)
    sp, op = _core_py.cap_stats(lin.copy(), nu)
    assert sc == pytest.approx(sp, rel=1e-14) and oc == pytest.approx(op, rel=1e-14)
    lin_c, lw_c = lin.copy(), lw.copy()
    lin_p, lw_p = lin.copy(), lw.copy()
    scale = 1.0 + sc / oc
    cython_core.cap_apply(lin_c, lw_c, nu, math.log(nu), scale, math.log(scale))
    _core_py.cap_apply(lin_p, lw_p, nu, math.log(nu), scale, math.log(scale))
    assert np.allclose(lin_c, lin_p, atol=1e-15)
    assert np.allclose(lw_c, lw_p, atol=1e-15)


def test_ip_update_agreement():
    rng = np.random.default_rng(4)
    ip = rng.normal(size=12)
    xrow = rng.normal(size=12)
    a, b = ip.copy(), ip.copy()
    cython_core.ip_update(a, xrow, 0.25)
    _core_py.ip_update(b, xrow, 0.25)
    assert np.array_equal(a, b)


def test_empty_arrays_are_legal():
    empty = np.empty(0)
    for mod in (cython_core, _core_py):
        assert mod.extrap_dot(empty, empty, empty, 0.5) == 0.0
        assert mod.sum_exp(empty) == 0.0
        s, o = mod.cap_stats(empty, 0.5)
        assert s == 0.0 and o == 0.0


def test_end_to_end_backend_equivalence(tmp_path):
    # The python fallback must produce the same Solution as the compiled
    # path (same arithmetic, different implementation language).
    import subprocess
    import sys
    script = (
        "import os, numpy as np\n"
        "from saddlesvm.data_model import load_libsvm\n"
        "from saddlesvm import saddle_core as sc\n"
        "from saddlesvm.backend import BACKEND\n"
        "data = load_libsvm(os.environ['IRIS'])\n"
        "sol = sc.solve(data, sc.SolveConfig(epsilon=1e-3, beta=0.1, seed=7))\n"
        "print(BACKEND, repr(sol.primal), sol.iterations)\n"
    )
    import os
    iris = os.path.join(os.path.dirname(__file__), "data", "iris.libsvm")
    results = {}
    for which in ("cython", "python"):
        env = dict(os.environ, SADDLESVM_BACKEND=which, IRIS=iris)
        out = subprocess.run([sys.executable, "-c", script], env=env,
                             capture_output=True, text=True, check=True)
        name, primal, iters = out.stdout.split()
        assert name == which
        results[which] = (primal, iters)
    assert abs(float(results["cython"][0]) - float(results["python"][0])) < 1e-12
    assert results["cython"][1] == results["python"][1]
