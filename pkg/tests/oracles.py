"""Independent reference evaluations used by several test modules."""

import math

import mpmath
import numpy as np


def kernel_F_mp(beta, theta, dps=30, beta_minus_one=None):
    """Complex F(beta, theta) in extended precision, from the path points."""
    with mpmath.workdps(dps):
        b = mpmath.mpf(beta)
        bm1 = b - 1 if beta_minus_one is None else mpmath.mpf(beta_minus_one)
        th = mpmath.mpf(theta)
        s = mpmath.sin(th)
        c = mpmath.cos(th) if abs(float(theta)) != 0.5 * math.pi else mpmath.mpf(0)
        root = mpmath.sqrt(bm1 * (bm1 + 2))
        ap = root * c - 1j * b * s
        am = -root * c - 1j * b * s
        zp = ap - 1j
        psi_p = mpmath.arg(zp)
        psi_m = -mpmath.pi - psi_p
        rad = abs(zp)
        sqp = mpmath.sqrt(rad) * mpmath.expj(psi_p / 2)
        sqm = mpmath.sqrt(rad) * mpmath.expj(psi_m / 2)
        dap = -1j * s + b / root * c
        dam = -1j * s - b / root * c
        return dap / (ap * sqp) - dam / (am * sqm)


def G_from_F_mp(beta, theta, dps=30):
    c_phase = mpmath.expj(-mpmath.pi / 4)
    return complex(1j * c_phase * kernel_F_mp(beta, theta, dps) / mpmath.sqrt(2))


def term_scale(beta, theta):
    """Magnitude of the two path contributions to F / sqrt(2); roundoff lives on this scale."""
    beta = np.asarray(beta, float)
    theta = np.asarray(theta, float)
    s, c = np.sin(theta), np.cos(theta)
    root = np.sqrt((beta - 1.0) * (beta + 1.0))
    ap = root * c - 1j * beta * s
    am = -root * c - 1j * beta * s
    d = np.abs(s) + beta / root * np.abs(c)
    return (d / np.abs(ap * np.sqrt(ap - 1j)) + d / np.abs(am * np.sqrt(am - 1j))) / math.sqrt(2.0)


def beta_integral_mp(weight, theta, dps=20):
    """int_1^inf G(beta, theta) weight(beta) d beta with beta = 1 + u^2, in mpmath."""
    near = abs(math.sin(theta))
    pts = sorted({0.0, near / 4, near, 4 * near, 1.0}) + [mpmath.inf]
    c_phase = mpmath.expj(-mpmath.pi / 4)

    def f(u):
        b = 1 + u * u
        g = (1j * c_phase * kernel_F_mp(b, theta, dps + 10, beta_minus_one=u * u) / mpmath.sqrt(2)).real
        return g * 2 * u * weight(b)

    with mpmath.workdps(dps):
        return float(mpmath.quad(f, [p for p in pts if p == mpmath.inf or p >= 0]))
