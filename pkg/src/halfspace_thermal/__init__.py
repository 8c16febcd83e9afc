"""Transient heat conduction in a half-space with mixed boundary conditions.

The surface x = 0 carries a prescribed temperature on y > 0 and a
prescribed heat flux on y < 0.  The field is evaluated semi-analytically
as a real integral over the steepest-descent parameter beta, and a
finite-difference solver is included as an independent check.
"""

from .field import (
    DEFAULT_CONFIG,
    FieldEvaluationError,
    FieldResult,
    GridResult,
    QuadratureConfig,
    evaluate_grid,
    evaluate_points,
    evaluate_slice,
    temperature,
    temperature_discontinuous_form,
    temperature_xy,
)
from .kernel import (
    QuadratureFailure,
    SingularKernelError,
    identity_integral,
    kernel_F_oracle,
    kernel_G,
)
from .model import (
    ConfigError,
    FieldSample,
    MaterialScales,
    ProblemSpec,
    load_problem,
    nondimensionalize,
    redimensionalize,
    to_cartesian,
    to_polar,
)
from .time_kernels import (
    ForcingProfile,
    InversionError,
    t1_ramp,
    t1_step,
    t2_ramp,
    t2_step,
    talbot_inverse,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONFIG",
    "ConfigError",
    "FieldEvaluationError",
    "FieldResult",
    "FieldSample",
    "ForcingProfile",
    "GridResult",
    "InversionError",
    "MaterialScales",
    "ProblemSpec",
    "QuadratureConfig",
    "QuadratureFailure",
    "SingularKernelError",
    "evaluate_grid",
    "evaluate_points",
    "evaluate_slice",
    "identity_integral",
    "kernel_F_oracle",
    "kernel_G",
    "load_problem",
    "nondimensionalize",
    "redimensionalize",
    "t1_ramp",
    "t1_step",
    "t2_ramp",
    "t2_step",
    "talbot_inverse",
    "temperature",
    "temperature_discontinuous_form",
    "temperature_xy",
    "to_cartesian",
    "to_polar",
]
