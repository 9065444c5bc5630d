import math

import numpy as np
import pytest
from scipy import special

from qalgebra.errors import DomainError
from qalgebra.ncplane import (
    NU,
    Grid,
    SolutionCandidate,
    asymptotic_profile,
    bessel_i,
    bessel_k,
    bessel_ode_residual,
    bessel_quarter,
    compare_operators,
    derived_q_operator,
    finite_difference_gap,
    general_q_operator,
    limit_operator,
    pde_residual,
    separated_ode_residual,
    separation_reduction,
    substitution_identity,
    variant_scan,
    wronskian,
)
from qalgebra.qcore import Deformation

SMALL_GRID = Grid(-1.0, 1.0, 0.5, 3.0, 11, 11)


@pytest.mark.parametrize("u", [0.1, 0.5, 2.0, 10.0, 14.9, 20.0])
def test_bessel_i_against_scipy(u):
    assert bessel_i(NU, u) == pytest.approx(special.iv(NU, u), rel=1e-9)


@pytest.mark.parametrize("u", [0.1, 0.5, 2.0, 4.9, 10.0])
def test_bessel_k_against_scipy(u):
    assert bessel_k(NU, u) == pytest.approx(special.kv(NU, u), rel=1e-8)


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_i(NU, 0.0)
    with pytest.raises(DomainError):
        bessel_k(NU, -1.0)
    with pytest.raises(DomainError):
        bessel_quarter("J", 1.0)


@pytest.mark.parametrize("kind", ["I", "K"])
@pytest.mark.parametrize("u", [0.3, 3.0, 12.0])
def test_bessel_ode(kind, u):
    assert bessel_ode_residual(kind, u) < 1e-9


@pytest.mark.parametrize("u", [0.5, 2.0, 10.0])
def test_wronskian(u):
    assert wronskian(u) == pytest.approx(-1 / u, rel=1e-9)


def test_large_argument_behavior():
    u = 30.0
    scaled = bessel_quarter("I", u) * math.sqrt(2 * math.pi * u) * math.exp(-u)
    assert scaled == pytest.approx(1 - (4 * NU * NU - 1) / (8 * u), abs=1e-4)


def test_printed_operator_at_minus_one_misses_x_factor():
    rows = compare_operators(general_q_operator(Deformation.general(-1.0)), limit_operator())
    by_stencil = {r["stencil"]: r["match"] for r in rows}
    assert by_stencil["dx"]
    assert by_stencil["dx dy"]
    assert by_stencil["dx^2"]
    assert not by_stencil["dy^2"]


def test_derived_operator_at_minus_one():
    rows = compare_operators(derived_q_operator(Deformation.general(-1.0)), limit_operator())
    assert all(r["match"] for r in rows)


def test_separation_and_substitution():
    assert separation_reduction(-1) == 0
    assert substitution_identity() == 0


def test_variant_scan_best_solves():
    scan = variant_scan(limit_operator(), 1.0, SMALL_GRID)
    best = scan[0]
    assert best["relative"] < 1e-8
    assert best["candidate"].sigma_y == 1
    printed = next(r for r in scan if r["printed"])
    assert printed["relative"] > 1e-3


def test_residual_field_rows():
    field = pde_residual(limit_operator(), SolutionCandidate(1.0, -1, 1, "I"), SMALL_GRID)
    rows = field.rows()
    assert len(rows) == 121
    assert rows[0][:2] == (-1.0, 0.5)


def test_grid_must_avoid_origin():
    with pytest.raises(DomainError):
        pde_residual(limit_operator(), SolutionCandidate(), Grid(-1.0, 1.0, 0.0, 1.0, 5, 5))


def test_finite_differences_converge_at_second_order():
    cand = SolutionCandidate(1.0, -1, 1, "K")
    coarse = finite_difference_gap(limit_operator(), cand, SMALL_GRID, 1e-2)
    fine = finite_difference_gap(limit_operator(), cand, SMALL_GRID, 5e-3)
    assert 3.0 <= coarse / fine <= 5.0


def test_printed_candidate_decays():
    profile = asymptotic_profile(SolutionCandidate(1.0, -1, -1, "I"))
    assert profile["behavior"] == "decays"
    assert profile["power_exponent"] == pytest.approx(-0.5, abs=0.1)


def test_gaussian_x_factor():
    cand = SolutionCandidate(1.0, -1, 1, "I")
    x = np.array([0.0, 1.0])
    g, _, _ = cand.x_factor(x)
    np.testing.assert_allclose(g, [1.0, math.exp(-1.0)])


def test_separated_ode_residual_on_linear_profile():
    y = np.array([0.5, 1.0, 2.0])
    out = separated_ode_residual(lambda t: (t, np.ones_like(t), np.zeros_like(t)), 1.0, y)
    np.testing.assert_allclose(out["residual"], -3 * y)
    assert out["max_abs"] == pytest.approx(6.0)
