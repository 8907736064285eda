# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core; mirrors membench.backends.reference bit for bit.

Both backends call libm exp on the same operand sequence, so results are
identical doubles, not merely close ones.
"""

from libc.math cimport exp

import numpy as np


def reset_pulse_train(double w0, double eta_base, double sigma_c2c, z):
    """Multiplicative filament decay over a train of identical RESET pulses."""
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t n = zv.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double w = w0
    cdef double eta
    cdef Py_ssize_t i
    for i in range(n):
        eta = eta_base * exp(sigma_c2c * zv[i])
        if eta > 1.0:
            eta = 1.0
        w *= 1.0 - eta
        out[i] = w
    return out_arr


def write_cycle_train(double w_bl, double w_blb, Py_ssize_t n_writes, int first_bit,
                      double eta_reset, double sigma_c2c, z):
    """Alternating-bit write cycling of one complementary cell."""
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef int bit = first_bit
    cdef double w_set, eta
    cdef Py_ssize_t k
    for k in range(n_writes):
        w_set = exp(sigma_c2c * zv[2 * k])
        if w_set > 1.0:
            w_set = 1.0
        eta = eta_reset * exp(sigma_c2c * zv[2 * k + 1])
        if eta > 1.0:
            eta = 1.0
        if bit:
            w_bl = w_set
            w_blb *= 1.0 - eta
        else:
            w_blb = w_set
            w_bl *= 1.0 - eta
        bit ^= 1
    return w_bl, w_blb
