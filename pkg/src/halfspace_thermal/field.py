"""Temperature field of the mixed Dirichlet/Neumann half-space problem.

The default assembly is the form that is continuous across theta = 0,

    T = T0/(pi sqrt2)  int_1^inf G(b, th) {T1(r, b, t) - T1(r, cos th, t)} db
      + T0'/(pi sqrt2) int_1^inf G(b, th) {T2(r, b, t) - T2(r, cos th, t)} db
      + T0 T1(r, cos th, t),

which follows from the split form

    T = T0/(pi sqrt2) int G T1 db + T0'/(pi sqrt2) int G T2 db
      + H(th) T0 T1(r, cos th, t) - (1 - H(th)) T0' T2(r, cos th, t)

and the identity (1/(pi sqrt2)) int G db = 1 - H(th).  The split form is
kept for cross-checking only; both integrals in it jump at theta = 0.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .kernel import HALF_PI, QuadratureFailure, beta_integral, trig
from .model import ProblemSpec, to_polar

log = logging.getLogger(__name__)

_NORM = 1.0 / (math.pi * math.sqrt(2.0))
# beyond this beta the weights are reached through the reciprocal tail map
_BETA_SPLIT_MAX = 1e8


class FieldEvaluationError(QuadratureFailure):
    """Quadrature for one term of the field failed to converge."""

    def __init__(self, message, term):
        super().__init__(message)
        self.term = term


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_panels: int = 4000

    def __post_init__(self):
        if not (self.rel_tol >= 1e-14 and math.isfinite(self.rel_tol)):
            raise ValueError("rel_tol must be >= 1e-14")
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise ValueError("abs_tol must be positive")
        if self.max_panels < 2:
            raise ValueError("max_panels must be >= 2")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class FieldResult:
    value: float
    error_estimate: float
    terms: dict = field(default_factory=dict)


def _beta_marks(r, t, profile):
    # beta where r beta / (2 sqrt(t - delay)) ~ 1 for every active term
    delays = profile.breakpoints or (0.0,)
    return sorted({2.0 * math.sqrt(t - d) / r for d in delays if t - d > 0})


def _beta_split(r, t):
    return min(max(2.0, 2.0 * math.sqrt(t) / r), _BETA_SPLIT_MAX)


def _cos_theta(theta):
    return float(trig(theta)[1])


def _integral(kernel_fn, r, theta, t, subtract, profile, cfg, term):
    """(1/(pi sqrt2)) int G(b) {K(r, b, t) - subtract} db and its error."""

    def weight(beta):
        val = kernel_fn(r, beta, t)
        return val - subtract if subtract else val

    value, err, ok = beta_integral(
        weight,
        theta,
        beta_split=_beta_split(r, t),
        beta_marks=_beta_marks(r, t, profile) if profile.closed_form else (),
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_panels=cfg.max_panels,
    )
    if not ok:
        raise FieldEvaluationError(
            f"{term} integral did not converge at r={r:g}, theta={theta:g}, t={t:g} (error {err:.2e})", term
        )
    return _NORM * value, _NORM * err


def _check_point(r, theta, t):
    if not (math.isfinite(r) and r >= 0):
        raise ValueError("r must be a finite number >= 0")
    if not (math.isfinite(theta) and abs(theta) <= HALF_PI):
        raise ValueError("theta must lie in [-pi/2, pi/2]")
    if not math.isfinite(t):
        raise ValueError("t must be finite")


def temperature(r: float, theta: float, t: float, spec: ProblemSpec,
                cfg: QuadratureConfig = DEFAULT_CONFIG) -> FieldResult:
    """Field at (r, theta, t) from the continuous assembly.

    Zero for t <= 0.  At r = 0 the braces vanish and the junction value is
    the limit T0 * T1(0, ., t) = T0 * f0(t); the gradient there is singular.
    """
    r, theta, t = float(r), float(theta), float(t)
    _check_point(r, theta, t)
    zero_terms = {"dirichlet_integral": 0.0, "neumann_integral": 0.0, "closed_form": 0.0}
    if t <= 0:
        return FieldResult(0.0, 0.0, zero_terms)
    ct = _cos_theta(theta)
    closed = spec.T0 * spec.f0.t1(r, ct, t) if spec.T0 else 0.0
    dirichlet = neumann = 0.0
    err = 0.0
    if r > 0:
        if spec.T0:
            base = spec.f0.t1(r, ct, t)
            dirichlet, e = _integral(spec.f0.t1, r, theta, t, base, spec.f0, cfg, "dirichlet")
            dirichlet *= spec.T0
            err += abs(spec.T0) * e
        if spec.T0_prime:
            base = spec.g0.t2(r, ct, t)
            neumann, e = _integral(spec.g0.t2, r, theta, t, base, spec.g0, cfg, "neumann")
            neumann *= spec.T0_prime
            err += abs(spec.T0_prime) * e
    terms = {"dirichlet_integral": dirichlet, "neumann_integral": neumann, "closed_form": closed}
    return FieldResult(dirichlet + neumann + closed, err, terms)


def temperature_discontinuous_form(r: float, theta: float, t: float, spec: ProblemSpec,
                                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> FieldResult:
    """Field from the split assembly with Heaviside-switched closed-form terms.

    Undefined on theta = 0, which is rejected.
    """
    r, theta, t = float(r), float(theta), float(t)
    _check_point(r, theta, t)
    if theta == 0.0:
        raise ValueError("the discontinuous form is undefined at theta = 0")
    if t <= 0:
        return FieldResult(0.0, 0.0, {"dirichlet_integral": 0.0, "neumann_integral": 0.0, "closed_form": 0.0})
    ct = _cos_theta(theta)
    dirichlet = neumann = 0.0
    err = 0.0
    if spec.T0:
        dirichlet, e = _integral(spec.f0.t1, r, theta, t, 0.0, spec.f0, cfg, "dirichlet")
        dirichlet *= spec.T0
        err += abs(spec.T0) * e
    if spec.T0_prime:
        neumann, e = _integral(spec.g0.t2, r, theta, t, 0.0, spec.g0, cfg, "neumann")
        neumann *= spec.T0_prime
        err += abs(spec.T0_prime) * e
    if theta > 0:
        closed = spec.T0 * spec.f0.t1(r, ct, t) if spec.T0 else 0.0
    else:
        closed = -spec.T0_prime * spec.g0.t2(r, ct, t) if spec.T0_prime else 0.0
    terms = {"dirichlet_integral": dirichlet, "neumann_integral": neumann, "closed_form": closed}
    return FieldResult(dirichlet + neumann + closed, err, terms)


def temperature_xy(x: float, y: float, t: float, spec: ProblemSpec,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> FieldResult:
    r, theta = to_polar(x, y)
    return temperature(r, theta, t, spec, cfg)


def _point_task(args):
    x, y, t, spec, cfg = args
    try:
        return temperature_xy(x, y, t, spec, cfg)
    except QuadratureFailure as exc:
        log.warning("flagged cell at x=%g, y=%g: %s", x, y, exc)
        return FieldResult(math.nan, math.inf, {"error": str(exc)})


def evaluate_points(xs, ys, t: float, spec: ProblemSpec, cfg: QuadratureConfig = DEFAULT_CONFIG,
                    workers: int = 1) -> list[FieldResult]:
    """Field at each (x, y); failed points come back as NaN with infinite error.

    With ``workers > 1`` the points are spread over processes; each point is
    computed independently, so the output matches the sequential run.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.shape != ys.shape:
        raise ValueError("xs and ys must have the same length")
    if np.any(xs < 0):
        raise ValueError("x must be >= 0")
    tasks = [(float(x), float(y), float(t), spec, cfg) for x, y in zip(xs, ys)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_point_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [_point_task(task) for task in tasks]


def evaluate_slice(x_fixed: float, y_points, t: float, spec: ProblemSpec,
                   cfg: QuadratureConfig = DEFAULT_CONFIG, workers: int = 1) -> np.ndarray:
    """Temperatures along the line x = x_fixed."""
    ys = np.asarray(y_points, dtype=float).ravel()
    results = evaluate_points(np.full(ys.shape, float(x_fixed)), ys, t, spec, cfg, workers)
    return np.array([res.value for res in results])


@dataclass(frozen=True)
class GridResult:
    """Field on a tensor grid; ``values[j, i]`` is at (x[i], y[j])."""

    x: np.ndarray
    y: np.ndarray
    t: float
    values: np.ndarray
    errors: np.ndarray

    @property
    def flagged(self) -> np.ndarray:
        return ~np.isfinite(self.values)


def evaluate_grid(x_range, y_range, nx: int, ny: int, t: float, spec: ProblemSpec,
                  cfg: QuadratureConfig = DEFAULT_CONFIG, workers: int = 1) -> GridResult:
    """Field on an nx-by-ny grid spanning ``x_range`` x ``y_range``."""
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 points per axis")
    if x_range[0] < 0 or x_range[1] < x_range[0] or y_range[1] < y_range[0]:
        raise ValueError("invalid grid ranges; x must lie in [0, inf)")
    x = np.linspace(x_range[0], x_range[1], nx)
    y = np.linspace(y_range[0], y_range[1], ny)
    xx, yy = np.meshgrid(x, y)
    results = evaluate_points(xx.ravel(), yy.ravel(), t, spec, cfg, workers)
    values = np.array([res.value for res in results]).reshape(ny, nx)
    errors = np.array([res.error_estimate for res in results]).reshape(ny, nx)
    return GridResult(x, y, float(t), values, errors)
