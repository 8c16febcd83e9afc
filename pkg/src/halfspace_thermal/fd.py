"""Finite-difference reference solver on a truncated rectangle.

Solves T_t = T_xx + T_yy on [0, depth] x [-width/2, width/2] with

    T = T0 f0(t)            on x = 0, y >= 0   (junction node is Dirichlet)
    T_x = T0' g0(t)         on x = 0, y < 0
    zero normal derivative  on the three far edges

using the 5-point Laplacian, ghost-node reflection for the Neumann edges
and Crank-Nicolson in time.

On a lattice the 5-point scheme places the effective junction between
the lowest Dirichlet node and the Neumann node below it, at a distance
h / (2 sqrt 2) under the Dirichlet node (this constant comes from the
steady lattice problem; see ``tests/test_fd.py``).  Leaving a node on
y = 0 therefore moves the junction by O(h), and because the field is
singular there the whole solution converges only at first order.  By
default the y nodes are shifted up by h / (2 sqrt 2) so that the effective
junction sits on y = 0, which restores second-order convergence away
from the junction.  The first step is replaced by two backward
Euler half-steps (Rannacher start-up) to damp the ringing that the jump of
the boundary data at t = 0 would otherwise excite.  The system matrix
is factorised once.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import splu

from .model import ProblemSpec

log = logging.getLogger(__name__)


class FdDivergenceError(RuntimeError):
    """Non-finite values appeared during time stepping."""


JUNCTION_OFFSET = 1.0 / (2.0 * math.sqrt(2.0))


@dataclass(frozen=True)
class FdGrid:
    """Uniform grid; ``junction_offset`` is the height of the lowest
    Dirichlet node above y = 0 in units of h (0 puts a node on the junction)."""

    depth: float = 1.0
    width: float = 2.0
    h: float = 0.01
    dt: float = 1e-4
    junction_offset: float = JUNCTION_OFFSET

    def __post_init__(self):
        for name in ("depth", "width", "h", "dt"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v!r}")
        for name, length in (("depth", self.depth), ("width", self.width / 2)):
            n = length / self.h
            if abs(n - round(n)) > 1e-6 * max(1.0, n):
                raise ValueError(f"h must divide {name} into whole cells")
        if not 0.0 <= self.junction_offset < 1.0:
            raise ValueError("junction_offset must lie in [0, 1)")

    @property
    def nx(self) -> int:
        return int(round(self.depth / self.h)) + 1

    @property
    def _half_cells(self) -> int:
        return int(round(0.5 * self.width / self.h))

    @property
    def ny(self) -> int:
        # a shifted grid gets one extra node so that it still covers [-w/2, w/2]
        return 2 * self._half_cells + 1 + (self.junction_offset > 0)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.depth, self.nx)

    @property
    def y(self) -> np.ndarray:
        lo = self._half_cells + (self.junction_offset > 0)
        return self.h * (np.arange(self.ny) - lo + self.junction_offset)

    def refined(self, factor: int = 2) -> "FdGrid":
        return FdGrid(self.depth, self.width, self.h / factor, self.dt / factor, self.junction_offset)


def _neumann_second_difference(n, h):
    main = np.full(n, -2.0)
    upper = np.ones(n - 1)
    lower = np.ones(n - 1)
    # reflected ghost nodes double the inward neighbour at both ends
    upper[0] = 2.0
    lower[-1] = 2.0
    return sp.diags([lower, main, upper], [-1, 0, 1], format="csr") / (h * h)


@dataclass
class FdSolution:
    """Snapshots of the FD field; ``fields[t][i, j]`` is at (x[i], y[j])."""

    grid: FdGrid
    spec: ProblemSpec
    fields: dict = field(default_factory=dict)

    @property
    def times(self) -> list:
        return sorted(self.fields)

    def _field_at(self, t):
        if t is None:
            t = self.times[-1]
        key = min(self.fields, key=lambda s: abs(s - t))
        if abs(key - t) > 0.5 * self.grid.dt:
            raise KeyError(f"no snapshot stored at t={t:g}")
        return self.fields[key]

    def sample(self, x, y, t=None) -> np.ndarray:
        """Bilinear interpolation of the snapshot at time ``t`` (latest by default)."""
        interp = RegularGridInterpolator((self.grid.x, self.grid.y), self._field_at(t), method="linear")
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        pts = np.column_stack([x.ravel(), y.ravel()])
        return interp(pts).reshape(x.shape)

    def far_boundary_deviation(self, t=None) -> float:
        """Largest departure from the unperturbed far field on the truncation edges.

        The far edge x = depth should stay at zero, and the edges y = +-width/2
        should carry the one-dimensional solutions of the Dirichlet and
        Neumann halves respectively.
        """
        if t is None:
            t = self.times[-1]
        u = self._field_at(t)
        g = self.grid
        dev = float(np.max(np.abs(u[-1, :])))
        x = g.x
        if self.spec.T0:
            top = self.spec.T0 * self.spec.f0.t1(x, 1.0, t)
            dev = max(dev, float(np.max(np.abs(u[:, -1] - top))))
        else:
            dev = max(dev, float(np.max(np.abs(u[:, -1]))))
        bottom = -self.spec.T0_prime * self.spec.g0.t2(x, 1.0, t) if self.spec.T0_prime else 0.0
        dev = max(dev, float(np.max(np.abs(u[:, 0] - bottom))))
        return dev


def solve(spec: ProblemSpec, grid: FdGrid = FdGrid(), t_end: float = 0.02, save_times=None) -> FdSolution:
    """March the FD scheme to ``t_end`` and keep snapshots at ``save_times``.

    Snapshots are taken at the nearest time step.  Raises
    :class:`FdDivergenceError` if the field stops being finite.
    """
    if not spec.f0.closed_form or not spec.g0.closed_form:
        raise ValueError("the FD solver needs profiles with time-domain values")
    if not (math.isfinite(t_end) and t_end > 0):
        raise ValueError("t_end must be positive")
    nx, ny, h, dt = grid.nx, grid.ny, grid.h, grid.dt
    nsteps = max(1, int(round(t_end / dt)))
    save_steps = {nsteps}
    if save_times is not None:
        for s in save_times:
            if not 0 < s <= t_end + 0.5 * dt:
                raise ValueError(f"save time {s!r} outside (0, t_end]")
            save_steps.add(max(1, int(round(s / dt))))

    lap = sp.kron(_neumann_second_difference(nx, h), sp.identity(ny), format="csr") + sp.kron(
        sp.identity(nx), _neumann_second_difference(ny, h), format="csr"
    )
    y = grid.y
    dirichlet = np.zeros((nx, ny), dtype=bool)
    dirichlet[0, :] = y >= -1e-9 * h
    flux_nodes = np.zeros((nx, ny), dtype=bool)
    flux_nodes[0, :] = ~dirichlet[0, :]

    d_idx = np.flatnonzero(dirichlet.ravel())
    u_idx = np.flatnonzero(~dirichlet.ravel())
    A = lap[u_idx][:, u_idx].tocsc()
    B = lap[u_idx][:, d_idx]
    b_col = np.asarray(B.sum(axis=1)).ravel()  # all Dirichlet nodes share one value
    flux_mask = flux_nodes.ravel()[u_idx].astype(float)

    def source(t):
        out = b_col * (spec.T0 * spec.f0.value(t))
        if spec.T0_prime:
            # ghost node T_{-1} = T_1 - 2h T0' g0 adds -2 T0' g0 / h to the x-difference
            out = out - flux_mask * (2.0 * spec.T0_prime * spec.g0.value(t) / h)
        return out

    eye = sp.identity(A.shape[0], format="csc")
    # a backward Euler half-step and a Crank-Nicolson step share I - dt/2 A
    lhs = splu((eye - 0.5 * dt * A).tocsc())
    cn_rhs = (eye + 0.5 * dt * A).tocsr()

    u = np.zeros(u_idx.size)
    solution = FdSolution(grid, spec)

    def store(step, u):
        t = step * dt
        full = np.empty(nx * ny)
        full[u_idx] = u
        full[d_idx] = spec.T0 * spec.f0.value(t)
        solution.fields[t] = full.reshape(nx, ny)

    # Rannacher start-up: two backward Euler half-steps
    for k in (1, 2):
        u = lhs.solve(u + 0.5 * dt * source(0.5 * k * dt))
    if 1 in save_steps:
        store(1, u)
    for step in range(2, nsteps + 1):
        t_old, t_new = (step - 1) * dt, step * dt
        rhs = cn_rhs @ u + 0.5 * dt * (source(t_old) + source(t_new))
        u = lhs.solve(rhs)
        if not np.all(np.isfinite(u)):
            raise FdDivergenceError(f"non-finite field at step {step} (t={t_new:g})")
        if step in save_steps:
            store(step, u)
    return solution


@dataclass(frozen=True)
class CompareReport:
    x: np.ndarray
    y: np.ndarray
    reference: np.ndarray
    candidate: np.ndarray
    tol: float

    @property
    def diffs(self) -> np.ndarray:
        return np.abs(self.candidate - self.reference)

    @property
    def max_diff(self) -> float:
        return float(np.max(self.diffs))

    @property
    def mean_diff(self) -> float:
        return float(np.mean(self.diffs))

    @property
    def passed(self) -> bool:
        return bool(np.all(np.isfinite(self.diffs))) and self.max_diff <= self.tol


def compare(sampler, reference, points, tol: float) -> CompareReport:
    """Pointwise comparison of two field evaluators.

    ``sampler`` and ``reference`` map arrays (x, y) to temperatures;
    ``points`` is an (n, 2) array of (x, y).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    return CompareReport(x, y, np.asarray(reference(x, y), float), np.asarray(sampler(x, y), float), float(tol))
