"""Problem definition, unit scaling and half-space coordinates.

Physical variables are scaled as

    x^ = x / x*,  y^ = y / y*,  t^ = t / t*,  T^ = (T - T*) / T*

with x* = 1 m, y* = 1 / sqrt(ell) m and t* = x*^2 / kappa, which turns the
anisotropic heat equation into the isotropic  T_xx + T_yy = T_t.  All
solver modules work in scaled variables only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .time_kernels import ForcingProfile

X_STAR = 1.0  # metres


class ConfigError(ValueError):
    """Invalid problem configuration; ``key`` names the offending entry."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


def _positive(name, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value) or value <= 0:
        raise ConfigError(f"{name} must be a positive finite number, got {value!r}", key=name)
    return float(value)


def _finite(name, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number, got {value!r}", key=name)
    return float(value)


@dataclass(frozen=True)
class MaterialScales:
    """Material constants and the derived nondimensionalisation scales.

    k : conductivity along x (W/m/K); ell : anisotropy ratio (conductivity
    along y is k * ell); rho : density (kg/m^3); c_v : specific heat
    (J/kg/K); T_star : reference temperature (K).
    """

    k: float
    ell: float
    rho: float
    c_v: float
    T_star: float

    def __post_init__(self):
        for name in ("k", "ell", "rho", "c_v", "T_star"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))

    @property
    def kappa(self) -> float:
        return self.k / (self.rho * self.c_v)

    @property
    def x_star(self) -> float:
        return X_STAR

    @property
    def y_star(self) -> float:
        return 1.0 / math.sqrt(self.ell)

    @property
    def t_star(self) -> float:
        return self.x_star**2 / self.kappa

    @classmethod
    def from_dict(cls, data) -> "MaterialScales":
        if not isinstance(data, dict):
            raise ConfigError("material must be an object", key="material")
        missing = [k for k in ("k", "ell", "rho", "c_v", "T_star") if k not in data]
        if missing:
            raise ConfigError(f"material is missing {missing[0]!r}", key=f"material.{missing[0]}")
        try:
            return cls(data["k"], data["ell"], data["rho"], data["c_v"], data["T_star"])
        except ConfigError as exc:
            raise ConfigError(str(exc), key=f"material.{exc.key}") from None

    def to_dict(self) -> dict:
        return {"k": self.k, "ell": self.ell, "rho": self.rho, "c_v": self.c_v, "T_star": self.T_star}


def _check_finite(*values):
    for v in values:
        if not np.all(np.isfinite(np.asarray(v, dtype=float))):
            raise ValueError("non-finite coordinate or temperature")


def nondimensionalize(x, y, t, T, scales: MaterialScales):
    """Physical (x, y, t, T) in (m, m, s, K) to scaled (x, y, t, T)."""
    _check_finite(x, y, t, T)
    return (
        np.divide(x, scales.x_star),
        np.divide(y, scales.y_star),
        np.divide(t, scales.t_star),
        np.divide(np.subtract(T, scales.T_star), scales.T_star),
    )


def redimensionalize(x, y, t, T, scales: MaterialScales):
    """Inverse of :func:`nondimensionalize`."""
    _check_finite(x, y, t, T)
    return (
        np.multiply(x, scales.x_star),
        np.multiply(y, scales.y_star),
        np.multiply(t, scales.t_star),
        np.multiply(np.add(T, 1.0), scales.T_star),
    )


def to_polar(x, y):
    """(x, y) with x >= 0 to (r, theta), theta in [-pi/2, pi/2]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_finite(x, y)
    if np.any(x < 0):
        raise ValueError("x must be >= 0 (outside the half-space)")
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    if r.ndim == 0:
        return float(r), float(theta)
    return r, theta


def to_cartesian(r, theta):
    """(r, theta) to (x, y); x is exactly zero on theta = +-pi/2."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    if np.any(np.abs(theta) > 0.5 * math.pi):
        raise ValueError("theta must lie in [-pi/2, pi/2]")
    x = np.where(np.abs(theta) == 0.5 * math.pi, 0.0, r * np.cos(theta))
    y = r * np.sin(theta)
    if x.ndim == 0:
        return float(x), float(y)
    return x, y


@dataclass(frozen=True)
class FieldSample:
    """A scaled spacetime point and the temperature computed there."""

    r: float
    theta: float
    t: float
    value: float = math.nan

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError("r must be >= 0")
        if not abs(self.theta) <= 0.5 * math.pi:
            raise ValueError("theta must lie in [-pi/2, pi/2]")

    @classmethod
    def from_xy(cls, x, y, t, value=math.nan) -> "FieldSample":
        r, theta = to_polar(x, y)
        return cls(r, theta, t, value)

    @property
    def x(self) -> float:
        return to_cartesian(self.r, self.theta)[0]

    @property
    def y(self) -> float:
        return to_cartesian(self.r, self.theta)[1]


@dataclass(frozen=True)
class ProblemSpec:
    """Boundary data in scaled units.

    T = T0 * f0(t) on x = 0, y > 0 and dT/dx = T0_prime * g0(t) on x = 0, y < 0.
    """

    T0: float
    T0_prime: float
    f0: ForcingProfile = field(default_factory=ForcingProfile.step)
    g0: ForcingProfile = field(default_factory=ForcingProfile.step)
    material: MaterialScales | None = None

    def __post_init__(self):
        object.__setattr__(self, "T0", _finite("T0", self.T0))
        object.__setattr__(self, "T0_prime", _finite("T0_prime", self.T0_prime))

    @classmethod
    def from_dict(cls, data) -> "ProblemSpec":
        if not isinstance(data, dict):
            raise ConfigError("problem configuration must be a JSON object")
        for key in ("T0", "T0_prime", "f0", "g0"):
            if key not in data:
                raise ConfigError(f"missing required key {key!r}", key=key)
        profiles = {}
        for key in ("f0", "g0"):
            try:
                profiles[key] = ForcingProfile.from_dict(data[key])
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}", key=key) from None
        material = MaterialScales.from_dict(data["material"]) if "material" in data else None
        return cls(data["T0"], data["T0_prime"], profiles["f0"], profiles["g0"], material)

    def to_dict(self) -> dict:
        out = {"T0": self.T0, "T0_prime": self.T0_prime, "f0": self.f0.to_dict(), "g0": self.g0.to_dict()}
        if self.material is not None:
            out["material"] = self.material.to_dict()
        return out


def load_problem(path) -> ProblemSpec:
    """Read a problem JSON file; raises :class:`ConfigError` on bad content."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return ProblemSpec.from_dict(data)
