"""Real Cagniard-de Hoop kernel G(beta, theta) and its complex progenitor.

The steepest-descent paths in the Fourier variable are

    alpha_pm(beta, theta) = -i beta sin(theta) pm sqrt(beta^2 - 1) cos(theta),   beta >= 1,

and the field is an integral over beta of the real weight

    G = [beta (cos(psi/2) + sin(psi/2))
         - cos(theta) sin(theta) (beta^2 - 1)^(-1/2) (cos(psi/2) - sin(psi/2))]
        / ((beta^2 - cos^2 theta) |beta + sin theta|^(1/2))

with psi = arg(alpha_+ - i) in [-pi/2, pi/2].  Internally the evaluation
uses phi = psi + pi/2, for which cos(psi/2) + sin(psi/2) = sqrt(2) sin(phi/2)
and cos(psi/2) - sin(psi/2) = sqrt(2) cos(phi/2); this removes the
cancellation at the start of the path.

Integrals over beta use beta = 1 + u^2 near the branch point (the
(beta^2 - 1)^(-1/2) singularity is absorbed by d beta = 2u du) and
beta = beta_split / w^2 for the infinite tail, so nothing is truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate

__all__ = [
    "ContourPoint",
    "KernelValue",
    "QuadratureFailure",
    "SingularKernelError",
    "alpha_paths",
    "psi_plus",
    "kernel_G",
    "kernel_F_oracle",
    "contour_point",
    "kernel_value",
    "identity_integral",
    "beta_integral",
    "HALF_PI",
    "C_PHASE",
]

HALF_PI = 0.5 * math.pi
# c = exp(-i pi / 4) links F and G:  c F = (sqrt(2) / i) G
C_PHASE = complex(math.cos(-math.pi / 4), math.sin(-math.pi / 4))
THETA_MIN = 1e-3


class SingularKernelError(ValueError):
    """Pointwise evaluation requested at the integrable singularity beta = 1."""


class QuadratureFailure(RuntimeError):
    """Adaptive quadrature failed to reach its tolerance."""


def trig(theta):
    """(sin, cos, 1 + sin) of theta with exact values at the half-space edges.

    cos is exactly zero at theta = +-pi/2 so that G vanishes identically on
    the Dirichlet surface, and 1 + sin is formed without cancellation.
    """
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    c = np.where(np.abs(theta) == HALF_PI, 0.0, np.cos(theta))
    s = np.where(theta == HALF_PI, 1.0, np.where(theta == -HALF_PI, -1.0, s))
    with np.errstate(divide="ignore", invalid="ignore"):
        one_plus_s = np.where(s >= 0, 1.0 + s, c * c / (1.0 - s))
    return s, c, one_plus_s


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(theta)) or np.any(np.abs(theta) > HALF_PI):
        raise ValueError("theta must lie in [-pi/2, pi/2]")
    return theta


def _check_beta(beta, strict):
    beta = np.asarray(beta, dtype=float)
    if np.any(~np.isfinite(beta)) or np.any(beta < 1.0):
        raise ValueError("beta must be >= 1")
    if strict and np.any(beta - 1.0 < 1e-300):
        raise SingularKernelError(
            "G is integrably singular at beta = 1; integrate with beta = 1 + u^2 instead"
        )
    return beta


def alpha_paths(beta, theta):
    """Points alpha_+ and alpha_- of the two steepest-descent paths."""
    beta = _check_beta(beta, strict=False)
    s, c, _ = trig(_check_theta(theta))
    root = np.sqrt((beta - 1.0) * (beta + 1.0)) * c
    ap = root - 1j * beta * s
    am = -root - 1j * beta * s
    return (ap, am) if np.ndim(ap) else (complex(ap), complex(am))


def _phi(beta, bm1, s, c, one_plus_s):
    # phi = psi_+ + pi/2 = atan2(Re(alpha_+ - i), -Im(alpha_+ - i))
    sq = np.sqrt(bm1 * (2.0 + bm1))
    return np.arctan2(sq * c, one_plus_s + bm1 * s), sq


def psi_plus(beta, theta):
    """Principal argument of alpha_+ - i, in [-pi/2, pi/2]."""
    beta = _check_beta(beta, strict=False)
    s, c, ops = trig(_check_theta(theta))
    phi, _ = _phi(beta, beta - 1.0, s, c, ops)
    out = phi - HALF_PI
    return out if np.ndim(out) else float(out)


def _g(beta, bm1, s, c, one_plus_s):
    """G from beta and an accurate beta - 1."""
    phi, sq = _phi(beta, bm1, s, c, one_plus_s)
    num = beta * np.sin(0.5 * phi) - c * s / sq * np.cos(0.5 * phi)
    den = (bm1 * (2.0 + bm1) + s * s) * np.sqrt(bm1 + one_plus_s)
    return math.sqrt(2.0) * num / den


def _g_times_2u(u, s, c, one_plus_s):
    """G(1 + u^2) * 2u, the integrand after beta = 1 + u^2; finite at u = 0."""
    bm1 = u * u
    beta = 1.0 + bm1
    phi, _ = _phi(beta, bm1, s, c, one_plus_s)
    # 2u / sqrt(beta^2 - 1) = 2 / sqrt(2 + u^2)
    num = 2.0 * u * beta * np.sin(0.5 * phi) - 2.0 * c * s / np.sqrt(2.0 + bm1) * np.cos(0.5 * phi)
    den = (bm1 * (2.0 + bm1) + s * s) * np.sqrt(bm1 + one_plus_s)
    return math.sqrt(2.0) * num / den


def kernel_G(beta, theta):
    """Real kernel G(beta, theta) for beta > 1.

    Raises :class:`SingularKernelError` at beta = 1, where G may be
    integrably infinite; callers integrating G must change variables.
    """
    beta = _check_beta(beta, strict=True)
    s, c, ops = trig(_check_theta(theta))
    out = _g(beta, beta - 1.0, s, c, ops)
    return out if np.ndim(out) else float(out)


def kernel_F_oracle(beta, theta):
    """Complex F(beta, theta) straight from the path points.

    Uses (alpha - i)^(1/2) = sqrt(R) exp(i psi / 2) with psi_+ principal and
    psi_- = -pi - psi_+.  Independent of :func:`kernel_G`; the two agree
    through c F = (sqrt(2) / i) G.
    """
    beta = _check_beta(beta, strict=True)
    theta = _check_theta(theta)
    s, c, _ = trig(theta)
    ap, am = alpha_paths(beta, theta)
    zp = ap - 1j
    radius = np.abs(zp)
    psi_p = np.angle(zp)
    psi_m = -np.pi - psi_p
    root_p = np.sqrt(radius) * np.exp(0.5j * psi_p)
    root_m = np.sqrt(radius) * np.exp(0.5j * psi_m)
    inv_p = 1.0 / (ap * root_p)
    inv_m = 1.0 / (am * root_m)
    slope = beta / np.sqrt((beta - 1.0) * (beta + 1.0)) * c
    out = -1j * s * (inv_p - inv_m) + slope * (inv_p + inv_m)
    return out if np.ndim(out) else complex(out)


@dataclass(frozen=True)
class ContourPoint:
    beta: float
    theta: float
    alpha_plus: complex
    alpha_minus: complex
    R: float
    psi_plus: float

    @property
    def psi_minus(self) -> float:
        return -math.pi - self.psi_plus


def contour_point(beta: float, theta: float) -> ContourPoint:
    ap, am = alpha_paths(beta, theta)
    s, _, ops = trig(theta)
    return ContourPoint(
        beta=float(beta),
        theta=float(theta),
        alpha_plus=ap,
        alpha_minus=am,
        R=float((beta - 1.0) + ops),
        psi_plus=psi_plus(beta, theta),
    )


@dataclass(frozen=True)
class KernelValue:
    G: float
    decay_class: str


def kernel_value(beta: float, theta: float, near: float = 1e-2) -> KernelValue:
    """G with a tag: ``"singular"`` within ``near`` of beta = 1, else ``"regular"``."""
    g = kernel_G(beta, theta)
    return KernelValue(g, "singular" if beta - 1.0 < near else "regular")


def u_breakpoints(theta, u_max, extra=()):
    """Initial panel edges on [0, u_max] for the beta = 1 + u^2 integral.

    Near theta = 0 the kernel varies on the scale u ~ |sin theta|, so the
    edges are graded geometrically from there.
    """
    pts = {0.0, float(u_max)}
    scale = abs(math.sin(theta))
    if scale > 0:
        x = scale / 4.0
        while x < u_max:
            pts.add(x)
            x *= 4.0
    for p in extra:
        if 0.0 < p < u_max:
            pts.add(float(p))
    return sorted(pts)


def beta_integral(
    weight,
    theta: float,
    *,
    beta_split: float = 2.0,
    beta_marks=(),
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    max_panels: int = 4000,
):
    """Integrate G(beta, theta) * weight(beta) over [1, inf).

    ``weight`` maps an array of beta values to an array (or a ``(k, n)``
    stack for several weights at once) and must be bounded at infinity.
    ``beta_marks`` are beta values where ``weight`` changes quickly.
    Returns ``(value, error_estimate, converged)``.
    """
    theta = float(_check_theta(theta))
    s, c, ops = trig(theta)
    beta_split = max(float(beta_split), 1.0 + 1e-12)
    u_max = math.sqrt(beta_split - 1.0)

    def near(u):
        return _g_times_2u(u, s, c, ops) * weight(1.0 + u * u)

    def tail(w):
        beta = beta_split / (w * w)
        jac = 2.0 * beta_split / (w * w * w)
        return _g(beta, beta - 1.0, s, c, ops) * jac * weight(beta)

    u_marks = [math.sqrt(m - 1.0) for m in beta_marks if 1.0 < m < beta_split]
    w_marks = [math.sqrt(beta_split / m) for m in beta_marks if m > beta_split]
    first = integrate(near, u_breakpoints(theta, u_max, u_marks), rel_tol=rel_tol, abs_tol=abs_tol / 2,
                      max_panels=max_panels)
    second = integrate(tail, sorted({0.0, 1.0, *w_marks}), rel_tol=rel_tol, abs_tol=abs_tol / 2,
                       max_panels=max_panels)
    value = np.asarray(first.value) + np.asarray(second.value)
    value = float(value) if value.ndim == 0 else value
    return value, first.error + second.error, first.converged and second.converged


def identity_integral(theta: float, *, rel_tol: float = 1e-12, abs_tol: float = 1e-13,
                      theta_min: float = THETA_MIN) -> float:
    """(1 / (pi sqrt 2)) * integral of G(beta, theta) over [1, inf).

    Equals 1 for theta < 0 and 0 for theta > 0.  The identity jumps at
    theta = 0, so |theta| < ``theta_min`` is refused.
    """
    theta = float(_check_theta(theta))
    if abs(theta) < theta_min:
        raise ValueError(f"|theta| must be >= {theta_min:g} for the identity integral")
    value, err, ok = beta_integral(np.ones_like, theta, rel_tol=rel_tol, abs_tol=abs_tol)
    if not ok:
        raise QuadratureFailure(f"identity integral did not converge at theta={theta!r} (error {err:.2e})")
    return value / (math.pi * math.sqrt(2.0))
