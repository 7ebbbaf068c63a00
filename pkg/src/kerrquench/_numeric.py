"""Small numeric helpers shared across modules."""

import numpy as np


def int_power(base, n):
    """``base ** n`` for a non-negative integer ``n`` by repeated squaring.

    Works element-wise on complex arrays and never goes through ``log``,
    so there is no branch cut in the result.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"exponent must be a non-negative integer, got {n!r}")
    n = int(n)
    base = np.asarray(base, dtype=np.complex128)
    result = np.ones_like(base)
    sq = base.copy()
    while n:
        if n & 1:
            result = result * sq
        n >>= 1
        if n:
            sq = sq * sq
    return result


def as_theta(theta):
    """Return ``(theta_1d, scalar_input)`` for scalar or array time input."""
    arr = np.asarray(theta, dtype=np.float64)
    return np.atleast_1d(arr).reshape(-1), arr.ndim == 0


def restore(values, scalar):
    return values[0] if scalar else values
