"""NumPy implementations of the solver's inner-loop kernels.

This is the pure-Python fallback for the compiled extension
``saddlesvm._core``.  Both backends expose the same functions; a run uses
one backend throughout, so determinism holds per backend (the two
backends may differ in the last ulp because of different summation
orders).

All vector arguments are contiguous float64 arrays.  Empty arrays are
legal everywhere (a simulated client may hold points of only one class).
"""
import numpy as np

BACKEND = "python"


def fwht_inplace(v):
    """Unnormalized Walsh-Hadamard butterfly, in place, power-of-two length."""
    n = v.shape[0]
    h = 1
    while h < n:
        blocks = v.reshape(-1, 2 * h)
        a = blocks[:, :h].copy()
        blocks[:, :h] += blocks[:, h:]
        blocks[:, h:] = a - blocks[:, h:]
        h *= 2


def extrap_dot(xrow, cur, prev, theta):
    """<xrow, cur + theta * (cur - prev)>."""
    if xrow.shape[0] == 0:
        return 0.0
    return float(np.dot(xrow, cur + theta * (cur - prev)))


def phi_log_weights(log_cur, ip, xrow, a_hist, c1, ddw, sign, out):
    """Log-domain multiplicative-weights exponents.

    out[j] = a_hist * log_cur[j] - sign * c1 * (ip[j] + ddw * xrow[j])

    ``ip`` caches <w[t], X_col_j>; ``ddw`` carries the momentum term so no
    fresh length-d dot product is ever taken.
    """
    np.multiply(log_cur, a_hist, out=out)
    out -= (sign * c1) * (ip + ddw * xrow)


def sum_exp(lw):
    """Sum of exp(lw), max-shifted before exponentiation."""
    if lw.shape[0] == 0:
        return 0.0
    m = float(np.max(lw))
    return float(np.exp(m) * np.sum(np.exp(lw - m)))


def finish_weights(lw, log_z, lin_out):
    """Normalize in log domain and materialize the linear weights."""
    lw -= log_z
    np.exp(lw, out=lin_out)


def cap_stats(lin, nu):
    """Excess mass above the cap and mass strictly below it."""
    if lin.shape[0] == 0:
        return 0.0, 0.0
    over = lin > nu
    varsigma = float(np.sum(lin[over] - nu))
    omega = float(np.sum(lin[lin < nu]))
    return varsigma, omega


def cap_apply(lin, lw, nu, log_nu, scale, log_scale):
    """One clip pass: clamp entries >= nu, scale the rest up."""
    over = lin >= nu
    under = ~over
    lin[over] = nu
    lw[over] = log_nu
    lin[under] *= scale
    lw[under] += log_scale


def ip_update(ip, xrow, dw):
    """Incremental cache update after a single-coordinate w change."""
    ip += dw * xrow
