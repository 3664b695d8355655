"""Shared test utilities: instance generators and independent numeric
minimizers (SLSQP over explicit simplex constraints) used to cross-check
the closed-form update and projection rules."""
from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from saddlesvm.data_model import Dataset


def make_instance(seed: int, shift: float = 2.5, n_lo: int = 3, n_hi: int = 11,
                  d_lo: int = 2, d_hi: int = 9) -> Dataset:
    """Random two-Gaussian instance; shift controls class separation."""
    rng = np.random.default_rng(100 + seed)
    n1 = int(rng.integers(n_lo, n_hi))
    n2 = int(rng.integers(n_lo, n_hi))
    d = int(rng.integers(d_lo, d_hi))
    Xp = rng.normal(size=(n1, d)) + shift
    Xm = rng.normal(size=(n2, d)) - shift
    X = np.vstack([Xp, Xm])
    y = np.array([1] * n1 + [-1] * n2)
    return Dataset(X, y)


def make_separable(seed: int) -> Dataset:
    return make_instance(seed, shift=2.5)


def make_overlapping(seed: int) -> Dataset:
    return make_instance(seed, shift=0.6)


def _constrained_argmin(fun, jac, x0: np.ndarray, nu: float | None) -> np.ndarray:
    n = len(x0)
    cap = 1.0 if nu is None else nu
    res = minimize(
        fun, x0, jac=jac, method="SLSQP",
        bounds=[(0.0, cap)] * n,
        constraints=[{"type": "eq", "fun": lambda y: np.sum(y) - 1.0,
                      "jac": lambda y: np.ones(n)}],
        options={"maxiter": 2000, "ftol": 1e-16},
    )
    return res.x


def kl_capped_argmin(p: np.ndarray, nu: float) -> np.ndarray:
    """Numeric argmin of KL(y || p) over the nu-capped simplex."""
    floor = 1e-300

    def fun(y):
        yc = np.maximum(y, floor)
        return float(np.sum(yc * (np.log(yc / p) - 1.0)))

    def jac(y):
        return np.log(np.maximum(y, floor) / p)

    n = len(p)
    # Warm start from a strictly interior blend so the log terms are tame.
    x0 = 0.5 * np.clip(p, 1e-6, nu) + 0.5 / n
    x0 /= x0.sum()
    return _constrained_argmin(fun, jac, x0, nu)


def line5_argmin(m: np.ndarray, log_prev: np.ndarray, gamma: float, tau: float,
                 d: int) -> np.ndarray:
    """Numeric minimizer of the per-iteration dual subproblem

        f(y) = (1/d) <m, y> + (gamma/d) sum y ln y + (1/tau) KL(y || y_prev)

    over the simplex.
    """
    floor = 1e-300
    a = gamma / d + 1.0 / tau

    def fun(y):
        yc = np.maximum(y, floor)
        ylog = np.log(yc)
        return float(np.dot(m / d, y) + (gamma / d) * np.sum(y * ylog)
                     + np.sum(y * (ylog - log_prev)) / tau)

    def jac(y):
        ylog = np.log(np.maximum(y, floor))
        return (m / d + (gamma / d) * (ylog + 1.0)
                + (ylog - log_prev + 1.0) / tau)

    n = len(m)
    return _constrained_argmin(fun, jac, np.full(n, 1.0 / n), None)
