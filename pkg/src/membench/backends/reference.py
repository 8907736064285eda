"""Pure-Python kernel reference implementations.

These are the semantics of record: the Cython core in ``_fastcore.pyx``
mirrors them operation for operation.  Keep every floating-point expression
in the same order in both files.
"""

from __future__ import annotations

import math

import numpy as np


def reset_pulse_train(w0: float, eta_base: float, sigma_c2c: float, z) -> np.ndarray:
    """Multiplicative filament decay over a train of identical RESET pulses.

    z holds one standard normal per pulse.  Returns w after each pulse.
    """
    z = np.asarray(z, dtype=np.float64)
    out = np.empty(z.shape[0], dtype=np.float64)
    w = w0
    for i in range(z.shape[0]):
        eta = eta_base * math.exp(sigma_c2c * z[i])
        if eta > 1.0:
            eta = 1.0
        w *= 1.0 - eta
        out[i] = w
    return out


def write_cycle_train(
    w_bl: float,
    w_blb: float,
    n_writes: int,
    first_bit: int,
    eta_reset: float,
    sigma_c2c: float,
    z,
) -> tuple[float, float]:
    """Alternating-bit write cycling of one complementary cell.

    Each write consumes two normals from z (SET target draw, then RESET
    jitter draw), matching the per-write draw order of the array path.
    """
    z = np.asarray(z, dtype=np.float64)
    bit = int(first_bit)
    for k in range(n_writes):
        w_set = math.exp(sigma_c2c * z[2 * k])
        if w_set > 1.0:
            w_set = 1.0
        eta = eta_reset * math.exp(sigma_c2c * z[2 * k + 1])
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
