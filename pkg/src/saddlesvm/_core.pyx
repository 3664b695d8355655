# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the solver's inner-loop kernels.

Mirrors ``saddlesvm._core_py`` function for function; see that module for
the contracts.
"""
from libc.math cimport exp, log

import numpy as np

BACKEND = "cython"


def fwht_inplace(double[::1] v):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double a, b
    while h < n:
        i = 0
        while i < n:
            for j in range(i, i + h):
                a = v[j]
                b = v[j + h]
                v[j] = a + b
                v[j + h] = a - b
            i += 2 * h
        h *= 2


def extrap_dot(double[::1] xrow, double[::1] cur, double[::1] prev, double theta):
    cdef Py_ssize_t j, n = xrow.shape[0]
    cdef double acc = 0.0
    for j in range(n):
        acc += xrow[j] * (cur[j] + theta * (cur[j] - prev[j]))
    return acc


def phi_log_weights(double[::1] log_cur, double[::1] ip, double[::1] xrow,
                    double a_hist, double c1, double ddw, double sign,
                    double[::1] out):
    cdef Py_ssize_t j, n = log_cur.shape[0]
    cdef double sc = sign * c1
    for j in range(n):
        out[j] = a_hist * log_cur[j] - sc * (ip[j] + ddw * xrow[j])


def sum_exp(double[::1] lw):
    cdef Py_ssize_t j, n = lw.shape[0]
    cdef double m, acc = 0.0
    if n == 0:
        return 0.0
    m = lw[0]
    for j in range(1, n):
        if lw[j] > m:
            m = lw[j]
    for j in range(n):
        acc += exp(lw[j] - m)
    return exp(m) * acc


def finish_weights(double[::1] lw, double log_z, double[::1] lin_out):
    cdef Py_ssize_t j, n = lw.shape[0]
    for j in range(n):
        lw[j] -= log_z
        lin_out[j] = exp(lw[j])


def cap_stats(double[::1] lin, double nu):
    cdef Py_ssize_t j, n = lin.shape[0]
    cdef double varsigma = 0.0, omega = 0.0
    for j in range(n):
        if lin[j] > nu:
            varsigma += lin[j] - nu
        elif lin[j] < nu:
            omega += lin[j]
    return varsigma, omega


def cap_apply(double[::1] lin, double[::1] lw, double nu, double log_nu,
              double scale, double log_scale):
    cdef Py_ssize_t j, n = lin.shape[0]
    for j in range(n):
        if lin[j] >= nu:
            lin[j] = nu
            lw[j] = log_nu
        else:
            lin[j] *= scale
            lw[j] += log_scale


def ip_update(double[::1] ip, double[::1] xrow, double dw):
    cdef Py_ssize_t j, n = ip.shape[0]
    for j in range(n):
        ip[j] += dw * xrow[j]
