import cmath
import math

import numpy as np
import pytest

from qalgebra.errors import DomainError
from qalgebra.perturb import (
    PLANES,
    GaugeField,
    WaveVector,
    curl_vector_potential,
    effective_field,
    field_branch_table,
    field_from_curl,
    field_samples,
    first_order_derivative_operator,
    first_order_operator_residual,
    is_gradient,
    line_integral,
    perturbed_derivative_check,
    phase_demo,
    plane_coordinate_confinement,
    q_planewave_check,
    stokes_check,
    vector_potential,
)
from qalgebra.qcore import Deformation


def test_vector_potential_example():
    A = vector_potential((1.0, 1.0, 0.0), 0.01, 1, (1.0, 1.0, 1.0))
    np.testing.assert_allclose(A, [-0.015, -0.005, 0.0], atol=1e-15)


def test_field_example():
    B = field_from_curl((1.0, 1.0, 0.0), 0.01, 1, 1.0)
    np.testing.assert_allclose(B, [0.0, 0.0, -0.01], atol=1e-15)
    np.testing.assert_allclose(effective_field((1.0, 1.0, 0.0), 0.01, 1.0), [0.0, 0.0, -0.01], atol=1e-15)


def test_branch_sign_flips_potential():
    plus = vector_potential((1.0, 2.0, 3.0), 0.01, 1, (0.3, -0.2, 0.5))
    minus = vector_potential((1.0, 2.0, 3.0), 0.01, -1, (0.3, -0.2, 0.5))
    np.testing.assert_allclose(plus, -minus)


def test_validation():
    with pytest.raises(DomainError):
        WaveVector((1.0, math.nan, 0.0))
    with pytest.raises(DomainError):
        GaugeField(WaveVector((1.0, 0.0, 0.0)), 0.01, 2)
    with pytest.raises(DomainError):
        GaugeField(WaveVector((1.0, 0.0, 0.0)), -0.01, 1)
    with pytest.raises(DomainError):
        plane_coordinate_confinement((1.0, 1.0, 0.0), "xw")
    with pytest.raises(DomainError):
        line_integral(GaugeField(WaveVector((1.0, 0.0, 0.0)), 0.01), [[0.0, 0.0, 0.0]])


def test_curl_against_finite_differences():
    out = curl_vector_potential((1.0, 2.0, 3.0), 0.01, 1)
    assert out["fd_agrees"]
    np.testing.assert_allclose(out["curl"], [0.06, -0.03, 0.02], atol=1e-15)


def test_printed_curl_flips_last_component():
    out = curl_vector_potential((1.0, 2.0, 3.0), 0.01, 1)
    assert out["component_verdicts"] == ["match", "match", "sign-flip"]


def test_gradient_only_for_single_component():
    assert is_gradient((1.0, 0.0, 0.0))
    assert not is_gradient((1.0, 1.0, 1.0))


@pytest.mark.parametrize("plane", sorted(PLANES))
def test_planar_motion_curl_is_normal(plane):
    out = plane_coordinate_confinement((1.5, -0.5, 2.0), plane)
    assert out["in_plane"] == 0.0


@pytest.mark.parametrize("plane", sorted(PLANES))
def test_stokes(plane):
    field = GaugeField(WaveVector((1.0, 2.0, 3.0)), 0.01)
    assert stokes_check(field, (0.3, 0.2, 0.1), 0.1, plane)["rel_error"] < 1e-6


def test_phase_demo():
    demo = phase_demo((1.0, 1.0, 1.0), 0.01, 1)
    paths = {row["path"]: row for row in demo["paths"]}
    zero = paths["zero-area"]
    assert complex(zero["phase_re"], zero["phase_im"]) == pytest.approx(1.0)
    assert paths["loop-xy"]["stokes_error"] < 1e-6
    assert math.isnan(paths["via-x"]["stokes_error"])
    pair = next(d for d in demo["differences"] if {d["a"], d["b"]} == {"via-x", "via-y"})
    assert pair["difference"] > 1e-6


def test_field_branch_table():
    rows = {row["sign"]: row["components"] for row in field_branch_table((1.0, 2.0, 3.0), 0.01, 1.0)}
    assert rows[1] == ["match", "sign-flip", "match"]
    assert rows[-1] == ["sign-flip", "match", "sign-flip"]


def test_field_samples_columns():
    rows = field_samples((1.0, 1.0, 0.0), 0.01, 1, [[1.0, 1.0, 1.0]])
    assert rows[0]["Ax"] == pytest.approx(-0.015)
    assert set(rows[0]) == {"x", "y", "z", "Ax", "Ay", "Az"}


def test_first_order_terms():
    labels = [t.label() for t in first_order_derivative_operator(0)]
    assert labels == ["1/2*x*dx*dx", "1*y*dy*dx", "1*z*dz*dx"]
    with pytest.raises(DomainError):
        first_order_derivative_operator(3)


@pytest.mark.parametrize("axis", [0, 1, 2])
@pytest.mark.parametrize("sign", [1, -1])
def test_plane_wave_identity(axis, sign):
    out = perturbed_derivative_check(axis, 0.001, sign, (1.0, 0.5, -0.25), (0.5, 0.25, 1.0))
    assert out["relative"] <= 1e-15


@pytest.mark.parametrize("axis", [0, 1, 2])
def test_first_order_remainder_is_second_order(axis):
    coarse = first_order_operator_residual(axis, 1e-3)
    fine = first_order_operator_residual(axis, 5e-4)
    assert fine <= 2 * coarse + 1e-6


def test_q_plane_wave_rescales_by_q_under_squared_realization():
    d = Deformation.unimodular(0.3)
    out = q_planewave_check(1.0, d, 14, "integral-action")
    assert out["rescaling_is_q"]
    assert out["residual"] < 1e-12


def test_q_plane_wave_unknown_realization():
    with pytest.raises(DomainError):
        q_planewave_check(1.0, Deformation.unimodular(0.3), 8, "other")


def test_q_plane_wave_coordinate_realization_has_no_single_rescaling():
    out = q_planewave_check(1.0, Deformation.unimodular(0.3), 14)
    assert out["realization"] == "sqrt"
    assert out["rescaling"] == pytest.approx(cmath.exp(0.15j) / math.sqrt(math.cos(0.3)), abs=1e-12)
    assert not out["rescaling_is_q"]
    assert out["residual"] > 1e-3


def test_q_plane_wave_classical_limit():
    for realization in ("sqrt", "integral-action"):
        assert q_planewave_check(1.0, Deformation.unimodular(0.0), 14, realization)["residual"] < 1e-12
