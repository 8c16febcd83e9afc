import json
import math

import numpy as np
import pytest

from halfspace_thermal.model import (
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
from halfspace_thermal.time_kernels import ForcingProfile

STEEL = {"k": 45.0, "ell": 4.0, "rho": 7850.0, "c_v": 490.0, "T_star": 300.0}


def test_scales():
    m = MaterialScales(**STEEL)
    assert m.kappa == pytest.approx(45.0 / (7850.0 * 490.0))
    assert m.x_star == 1.0
    assert m.y_star == pytest.approx(0.5)
    assert m.t_star == pytest.approx(1.0 / m.kappa)


def test_scaling_round_trip():
    m = MaterialScales(**STEEL)
    x, y, t, T = np.array([0.1, 0.4]), np.array([-0.2, 0.3]), np.array([10.0, 500.0]), np.array([310.0, 295.0])
    back = redimensionalize(*nondimensionalize(x, y, t, T, m), m)
    for a, b in zip(back, (x, y, t, T)):
        np.testing.assert_allclose(a, b, rtol=1e-15)


def test_scaled_temperature_zero_at_reference():
    m = MaterialScales(**STEEL)
    assert nondimensionalize(0.0, 0.0, 0.0, 300.0, m)[3] == 0.0


def test_scaling_rejects_non_finite():
    m = MaterialScales(**STEEL)
    with pytest.raises(ValueError):
        nondimensionalize(0.0, math.nan, 0.0, 300.0, m)


@pytest.mark.parametrize("key", ["k", "ell", "rho", "c_v", "T_star"])
def test_material_must_be_positive(key):
    bad = dict(STEEL, **{key: 0.0})
    with pytest.raises(ConfigError) as err:
        MaterialScales.from_dict(bad)
    assert err.value.key == f"material.{key}"


def test_polar_round_trip():
    x = np.array([0.0, 0.0, 0.5, 1.0, 2e-3])
    y = np.array([0.3, -0.3, 0.0, -2.0, 1e-3])
    r, theta = to_polar(x, y)
    assert theta[0] == pytest.approx(math.pi / 2)
    assert theta[1] == pytest.approx(-math.pi / 2)
    xb, yb = to_cartesian(r, theta)
    np.testing.assert_allclose(xb, x, atol=1e-16)
    np.testing.assert_allclose(yb, y, atol=1e-16)
    assert to_cartesian(1.0, math.pi / 2)[0] == 0.0


def test_polar_rejects_outside_half_space():
    with pytest.raises(ValueError):
        to_polar(-0.1, 0.0)
    with pytest.raises(ValueError):
        to_cartesian(1.0, 2.0)


def test_field_sample():
    s = FieldSample.from_xy(0.3, -0.4, 0.02)
    assert s.r == pytest.approx(0.5)
    assert s.x == pytest.approx(0.3)
    assert s.y == pytest.approx(-0.4)
    with pytest.raises(ValueError):
        FieldSample(-1.0, 0.0, 0.0)


def test_problem_round_trip(tmp_path):
    spec = ProblemSpec(1.0, 0.5, ForcingProfile.ramp(0.1, 0.2), ForcingProfile.step(), MaterialScales(**STEEL))
    path = tmp_path / "p.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert load_problem(path) == spec


@pytest.mark.parametrize("missing", ["T0", "T0_prime", "f0", "g0"])
def test_missing_key_is_named(missing):
    data = {"T0": 1, "T0_prime": 0, "f0": {"type": "step"}, "g0": {"type": "step"}}
    del data[missing]
    with pytest.raises(ConfigError) as err:
        ProblemSpec.from_dict(data)
    assert err.value.key == missing
    assert missing in str(err.value)


def test_bad_profile_is_named():
    data = {"T0": 1, "T0_prime": 0, "f0": {"type": "ramp", "a": 0.3, "b": 0.1}, "g0": {"type": "step"}}
    with pytest.raises(ConfigError) as err:
        ProblemSpec.from_dict(data)
    assert err.value.key == "f0"


def test_non_numeric_amplitude():
    with pytest.raises(ConfigError) as err:
        ProblemSpec.from_dict({"T0": "hot", "T0_prime": 0, "f0": {"type": "step"}, "g0": {"type": "step"}})
    assert err.value.key == "T0"


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_problem(path)
