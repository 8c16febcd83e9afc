"""Repeated integrals of the complementary error function.

``iterated_erfc(n, z)`` returns i^n erfc(z), defined by

    i^0 erfc(z) = erfc(z),    i^n erfc(z) = int_z^inf i^(n-1) erfc(u) du.

Every diffusion time kernel in this package is a scaled i^n erfc, so the
accuracy of this module bounds the accuracy of everything downstream.
"""

import numpy as np
from scipy.special import erfc as _erfc_direct
from scipy.special import erfcx

_INV_SQRT_PI = 1.0 / np.sqrt(np.pi)

# below this the forward recurrence is free of cancellation
_FORWARD_LIMIT = 1.0
# backward recurrence start offsets; convergence is slower for small z
_MILLER_EXTRA_NEAR = 200
_MILLER_EXTRA_FAR = 60
_NEAR_LIMIT = 3.0


def exp_minus_square(z):
    """exp(-z**2) without the rounding error of forming z**2.

    z is split into a 26-bit head and a tail so the head's square is exact.
    """
    # exp(-40^2) is already far below the smallest subnormal
    z = np.minimum(np.abs(np.asarray(z, dtype=float)), 40.0)
    head = np.ldexp(np.round(np.ldexp(z, -(np.frexp(z)[1] - 26))), np.frexp(z)[1] - 26)
    tail = z - head
    with np.errstate(under="ignore"):
        return np.exp(-head * head) * np.exp(-(2.0 * head + tail) * tail)


def erfc(z):
    """Complementary error function, ~1e-15 relative on [0, 26.5].

    Subnormal results (z above about 26.55) lose relative precision and
    anything past z = 27 is returned as exactly zero.
    """
    z = np.asarray(z, dtype=float)
    out = _erfc_direct(z)
    tail = z > 0.5
    if np.any(tail):
        zt = z[tail] if z.ndim else z
        val = erfcx(zt) * exp_minus_square(zt)
        val = np.where(zt > 27.0, 0.0, val)
        if z.ndim:
            out[tail] = val
        else:
            out = val
    return out if np.ndim(out) else float(out)


def _forward(n, z):
    j_prev = erfcx(z)
    if n == 0:
        return j_prev
    j_cur = _INV_SQRT_PI - z * j_prev
    for k in range(2, n + 1):
        j_prev, j_cur = j_cur, (j_prev - 2.0 * z * j_cur) / (2.0 * k)
    return j_cur


def _miller(n, z, extra):
    # i^n erfc is the recessive solution of 2k y_k = y_{k-2} - 2z y_{k-1},
    # so the backward recurrence is stable once z is away from zero
    top = n + extra
    y_hi = np.zeros_like(z)
    y_mid = np.full_like(z, 1e-30)
    y_n = None
    for k in range(top + 1, 1, -1):
        y_lo = 2.0 * k * y_hi + 2.0 * z * y_mid
        y_hi, y_mid = y_mid, y_lo
        # rescale to avoid overflow on long runs
        scale = np.abs(y_mid)
        big = scale > 1e250
        if np.any(big):
            y_hi = np.where(big, y_hi / scale, y_hi)
            y_mid = np.where(big, y_mid / scale, y_mid)
            if y_n is not None:
                y_n = np.where(big, y_n / scale, y_n)
        if k - 2 == n:
            y_n = y_mid
    return y_n / y_mid * erfcx(z)


def iterated_erfc(n, z):
    """Evaluate i^n erfc(z) for integer ``n >= 0`` and real ``z``.

    Negative ``z`` is only supported for ``n == 0``.  Results underflow to
    zero for z beyond about 26.5.
    """
    if n < 0 or int(n) != n:
        raise ValueError(f"order must be a non-negative integer, got {n!r}")
    n = int(n)
    z = np.asarray(z, dtype=float)
    if n == 0:
        return erfc(z)
    if np.any(z < 0):
        raise ValueError("iterated_erfc with n > 0 requires z >= 0")

    flat = np.atleast_1d(z).ravel()
    scaled = np.empty_like(flat)
    low = flat < _FORWARD_LIMIT
    if np.any(low):
        scaled[low] = _forward(n, flat[low])
    near = ~low & (flat < _NEAR_LIMIT)
    if np.any(near):
        scaled[near] = _miller(n, flat[near], _MILLER_EXTRA_NEAR)
    far = flat >= _NEAR_LIMIT
    if np.any(far):
        scaled[far] = _miller(n, flat[far], _MILLER_EXTRA_FAR)
    out = scaled * exp_minus_square(flat)
    out = np.where(flat > 27.0, 0.0, out).reshape(z.shape)
    return out if out.ndim else float(out)


def iterated_erfc_at_zero(n):
    """Closed form i^n erfc(0) = 1 / (2^n Gamma(n/2 + 1))."""
    from math import gamma

    return 1.0 / (2.0**n * gamma(n / 2.0 + 1.0))
