"""Forcing profiles and their inverse-Laplace time kernels.

A boundary profile f0(t) enters the field through two kernels

    T1(r, beta, t) = L^-1[ f0~(s) exp(-beta r sqrt(s)) ](t)
    T2(r, beta, t) = L^-1[ f0~(s) exp(-beta r sqrt(s)) / sqrt(s) ](t)

(T1 for the Dirichlet side, T2 for the flux side).  Profiles built from
delayed powers, f0~(s) = sum_k w_k exp(-d_k s) / s^p_k, have closed-form
kernels because

    L^-1[ exp(-q sqrt(s)) / s^(1 + n/2) ](tau) = (4 tau)^(n/2) i^n erfc(q / (2 sqrt(tau))).

Profiles known only through their transform fall back on numerical
inversion with a fixed-Talbot contour (:func:`talbot_inverse`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .special import iterated_erfc

__all__ = [
    "ForcingProfile",
    "InversionError",
    "diffusion_kernel",
    "t1_step",
    "t2_step",
    "t1_ramp",
    "t2_ramp",
    "talbot_inverse",
]


class InversionError(RuntimeError):
    """Numerical Laplace inversion did not reach the requested accuracy."""


def diffusion_kernel(order, q, tau):
    """(4 tau)^(order/2) i^order erfc(q / (2 sqrt(tau))), zero for tau <= 0.

    ``order`` 0 is the step response, 1 the flux-weighted step response,
    2 the ramp response and so on.  Broadcasts over ``q`` and ``tau``.
    """
    q, tau = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(tau, dtype=float))
    out = np.zeros(q.shape)
    live = tau > 0
    if np.any(live):
        tl = tau[live]
        root = np.sqrt(tl)
        z = q[live] / (2.0 * root)
        val = iterated_erfc(order, z)
        if order:
            val = val * (2.0 * root) ** order
        out[live] = val
    return out if out.ndim else float(out)


def t1_step(r, beta, t):
    """Dirichlet kernel of a unit step, erfc(r beta / (2 sqrt(t)))."""
    return diffusion_kernel(0, np.multiply(r, beta), t)


def t2_step(r, beta, t):
    """Flux kernel of a unit step, 2 sqrt(t/pi) exp(-q^2/4t) - q erfc(q / 2 sqrt(t))."""
    return diffusion_kernel(1, np.multiply(r, beta), t)


def _ramp_terms(a, b):
    _check_ramp(a, b)
    return ((1.0, 0.0, 1), (1.0, a, 2), (-2.0, b, 2), (1.0, 2.0 * b - a, 2))


def _check_ramp(a, b):
    if not (np.isfinite(a) and np.isfinite(b)) or not 0.0 < a < b:
        raise ValueError(f"ramp breakpoints need 0 < a < b, got a={a!r}, b={b!r}")


def _kernel_sum(terms, r, beta, t, flux):
    q = np.multiply(r, beta)
    t = np.asarray(t, dtype=float)
    total = 0.0
    for weight, delay, power in terms:
        order = 2 * power - 1 if flux else 2 * power - 2
        total = total + weight * diffusion_kernel(order, q, t - delay)
    return total


def t1_ramp(r, beta, t, a, b):
    """Dirichlet kernel of the step-plus-ramp profile with breakpoints a, b, 2b - a."""
    return _kernel_sum(_ramp_terms(a, b), r, beta, t, flux=False)


def t2_ramp(r, beta, t, a, b):
    """Flux kernel of the step-plus-ramp profile."""
    return _kernel_sum(_ramp_terms(a, b), r, beta, t, flux=True)


@dataclass(frozen=True)
class ForcingProfile:
    """Temporal boundary profile, zero for t < 0.

    Use the constructors :meth:`step`, :meth:`ramp` and :meth:`custom`.
    ``terms`` lists ``(weight, delay, power)`` triples of the transform
    ``sum weight * exp(-delay s) / s**power``; it is empty for custom
    profiles, which carry ``laplace`` instead.
    """

    kind: str
    terms: tuple = ()
    a: float | None = None
    b: float | None = None
    laplace: Callable | None = field(default=None, compare=False)

    @classmethod
    def step(cls) -> "ForcingProfile":
        return cls("step", ((1.0, 0.0, 1),))

    @classmethod
    def ramp(cls, a: float, b: float) -> "ForcingProfile":
        a, b = float(a), float(b)
        return cls("ramp", _ramp_terms(a, b), a=a, b=b)

    @classmethod
    def custom(cls, laplace: Callable) -> "ForcingProfile":
        if not callable(laplace):
            raise TypeError("custom profile needs a callable Laplace transform")
        return cls("custom", laplace=laplace)

    @classmethod
    def from_dict(cls, data: dict) -> "ForcingProfile":
        if not isinstance(data, dict) or "type" not in data:
            raise ValueError("profile must be an object with a 'type' key")
        kind = data["type"]
        if kind == "step":
            return cls.step()
        if kind == "ramp":
            for key in ("a", "b"):
                if key not in data:
                    raise ValueError(f"ramp profile is missing '{key}'")
            return cls.ramp(data["a"], data["b"])
        raise ValueError(f"unknown profile type {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "step":
            return {"type": "step"}
        if self.kind == "ramp":
            return {"type": "ramp", "a": self.a, "b": self.b}
        raise ValueError("custom profiles have no JSON form")

    @property
    def closed_form(self) -> bool:
        return bool(self.terms)

    @property
    def breakpoints(self) -> tuple:
        return tuple(d for _, d, _ in self.terms)

    def value(self, t):
        """Profile value f0(t)."""
        if not self.closed_form:
            raise NotImplementedError("time-domain values of custom profiles are not available")
        t = np.asarray(t, dtype=float)
        total = np.zeros(t.shape)
        for weight, delay, power in self.terms:
            tau = t - delay
            # H(tau) tau^(p-1) / (p-1)!, with H(0) = 1 so the step is on at t = 0
            part = np.where(tau >= 0, np.maximum(tau, 0.0) ** (power - 1) / math.factorial(power - 1), 0.0)
            total = total + weight * part
        return total if total.ndim else float(total)

    def transform(self, s):
        """Laplace transform f0~(s)."""
        if not self.closed_form:
            return self.laplace(s)
        s = np.asarray(s)
        total = 0.0
        for weight, delay, power in self.terms:
            total = total + weight * np.exp(-delay * s) / s**power
        return total

    def t1(self, r, beta, t):
        """Dirichlet time kernel T1(r, beta, t)."""
        if self.closed_form:
            return _kernel_sum(self.terms, r, beta, t, flux=False)
        return _talbot_kernel(self.laplace, r, beta, t, flux=False)

    def t2(self, r, beta, t):
        """Flux time kernel T2(r, beta, t)."""
        if self.closed_form:
            return _kernel_sum(self.terms, r, beta, t, flux=True)
        return _talbot_kernel(self.laplace, r, beta, t, flux=True)

    def sup_abs(self, t) -> float:
        """max |f0| over [0, t], used for a priori field bounds."""
        if not self.closed_form:
            return math.inf
        grid = [0.0, float(t)] + [d for d in self.breakpoints if 0.0 <= d <= t]
        return float(max(abs(self.value(x)) for x in grid))


def _talbot_kernel(laplace, r, beta, t, flux, rel_tol=1e-8, max_nodes=4096):
    # vectorised over r * beta for a single time, which is how the field
    # assembly calls it; other shapes fall back to pointwise inversion
    q = np.multiply(r, beta)
    if np.ndim(t) == 0:
        t = float(t)
        q_arr = np.atleast_1d(np.asarray(q, dtype=float))
        out = np.zeros(q_arr.shape)
        if t <= 0:
            return out.reshape(np.shape(q)) if np.ndim(q) else 0.0
        z = q_arr / (2.0 * math.sqrt(t))
        live = z <= _TALBOT_Z_MAX
        if np.any(live):
            # past its optimum the contour sum loses accuracy quickly, so each
            # q gets a node count near its own minimum rather than the largest
            idx = np.flatnonzero(live)
            start = np.array([_min_nodes(qq, t) for qq in q_arr[idx]])
            bucket = 32 * 2 ** np.floor(np.log2(start / 32.0)).astype(int)
            for n0 in np.unique(bucket):
                sel = idx[bucket == n0]
                out[sel] = _talbot_converged(laplace, q_arr[sel], t, int(n0), flux, rel_tol, max_nodes)
        return out.reshape(np.shape(q)) if np.ndim(q) else float(out[0])
    q, t = np.broadcast_arrays(np.asarray(q, float), np.asarray(t, float))
    out = np.array([talbot_inverse(laplace, qq, 1.0, tt, "flux" if flux else 1) for qq, tt in zip(q.ravel(), t.ravel())])
    return out.reshape(q.shape)


def _talbot_converged(laplace, qs, t, n, flux, rel_tol, max_nodes):
    # entries are frozen as soon as two successive node counts agree;
    # further doubling would only add roundoff to them
    out = np.empty(qs.shape)
    active = np.arange(qs.size)
    prev = _talbot_many(laplace, qs, t, n, flux)
    while active.size:
        n *= 2
        if n > max_nodes:
            raise InversionError(f"Talbot inversion did not converge at t={t:g}")
        cur = _talbot_many(laplace, qs[active], t, n, flux)
        done = np.abs(cur - prev) <= rel_tol * np.abs(cur)
        out[active[done]] = cur[done]
        active, prev = active[~done], cur[~done]
    return out


def _contour(t, nodes):
    theta = np.pi * (2.0 * np.arange(nodes // 2) + 1.0) / nodes
    scale = nodes / t
    cot = 1.0 / np.tan(_ALPHA * theta)
    s = scale * (_SIGMA + _MU * theta * cot + 1j * _NU * theta)
    ds = scale * (_MU * cot - _MU * _ALPHA * theta / np.sin(_ALPHA * theta) ** 2 + 1j * _NU)
    return s, ds


def _talbot_many(laplace, q, t, nodes, flux):
    s, ds = _contour(t, nodes)
    root = np.sqrt(s)
    base = laplace(s) * np.exp(s * t) * ds
    if flux:
        base = base / root
    with np.errstate(under="ignore"):
        terms = np.exp(-np.outer(q, root)) * base
    return np.sum(terms, axis=1).imag * 2.0 / nodes


# Weideman-Trefethen optimised cotangent contour
_SIGMA, _MU, _ALPHA, _NU = -0.6122, 0.5017, 0.6407, 0.2645


def _talbot_sum(fn, t, nodes):
    s, ds = _contour(t, nodes)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        terms = np.exp(s * t) * fn(s) * ds
    # conjugate symmetry: the lower half of the contour mirrors the upper
    return float(np.sum(terms).imag * 2.0 / nodes)


# beyond this q / (2 sqrt(t)) the kernels are below 1e-60 and roundoff in
# the contour sum defeats relative accuracy; such values are returned as 0
_TALBOT_Z_MAX = 12.0


def _min_nodes(q, tau):
    # relative accuracy for tiny exp(-z^2) values needs ~3 z^2 nodes
    z = q / (2.0 * math.sqrt(tau))
    return max(32, 2 * math.ceil(1.5 * z * z))


def talbot_inverse(
    laplace_fn,
    r: float,
    beta: float,
    t: float,
    weight=1,
    *,
    rel_tol: float = 1e-8,
    nodes: int | None = None,
    max_nodes: int = 4096,
) -> float:
    """Numerically invert weight(s) * F(s) * exp(-beta r sqrt(s)) at time ``t``.

    ``laplace_fn`` is either a callable F(s) analytic for Re(s) > 0, or a
    closed-form :class:`ForcingProfile`; for the latter each delayed term
    exp(-d s)/s^p is inverted separately at t - d, which keeps the contour
    free of the exponential growth a delay would otherwise cause.

    ``weight`` selects the kernel type: ``1`` for T1, ``"flux"`` (or any
    non-1 value such as the string ``"1/sqrt(s)"``) for the 1/sqrt(s)
    weighted T2.

    The node count starts at 32 (more for strongly damped exponentials)
    and is doubled until two successive sums agree to ``rel_tol``.  When
    beta r / (2 sqrt(t)) exceeds 12 the true value is below 1e-60 and
    0.0 is returned.
    """
    flux = weight != 1
    if t <= 0:
        return 0.0
    q = float(r) * float(beta)

    if isinstance(laplace_fn, ForcingProfile) and laplace_fn.closed_form:
        total = 0.0
        for w, delay, power in laplace_fn.terms:
            tau = t - delay
            if tau <= 0:
                continue
            total += w * talbot_inverse(
                _power_transform(power), r, beta, tau, weight,
                rel_tol=rel_tol, nodes=nodes, max_nodes=max_nodes,
            )
        return total
    if isinstance(laplace_fn, ForcingProfile):
        laplace_fn = laplace_fn.laplace

    if q / (2.0 * math.sqrt(t)) > _TALBOT_Z_MAX:
        return 0.0

    def fn(s):
        root = np.sqrt(s)
        val = laplace_fn(s) * np.exp(-q * root)
        return val / root if flux else val

    n = nodes or _min_nodes(q, t)
    prev = _talbot_sum(fn, t, n)
    while True:
        n *= 2
        if n > max_nodes:
            raise InversionError(
                f"Talbot inversion did not reach rel_tol={rel_tol:g} at t={t:g}, r*beta={q:g}"
            )
        cur = _talbot_sum(fn, t, n)
        if abs(cur - prev) <= rel_tol * abs(cur) or (cur == 0.0 and prev == 0.0):
            return cur
        prev = cur


def _power_transform(power):
    return lambda s: s ** (-power)
