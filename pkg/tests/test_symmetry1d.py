import math

import numpy as np
import pytest

from qalgebra.dilation import dilation_op, sqrt_realization
from qalgebra.errors import DomainError, SingularModeError
from qalgebra.qcore import Deformation, jackson_partial_sum
from qalgebra.series import TruncatedSeries, differentiate, evaluate
from qalgebra.symmetry1d import (
    HamiltonianSpec,
    PartitionPotentialSpec,
    PotentialSpec,
    apply_hamiltonian,
    commutant_nullspace_distance,
    coulomb_potential,
    curve_scale,
    deform_coulomb_curve,
    deform_coulomb_series,
    gauge_transform_potential,
    invariance_residual,
    locate_pole,
    partition_mode_factors,
    partition_potential,
    partition_recursion,
    partition_scan,
    predicted_pole,
    q_independence_sweep,
    qcommutator_closure,
    qprimitive_transform,
    real_pole,
    realization_recursion_residual,
    recursion_invariance,
    recursion_q_independent_derived,
    singular_modes,
    solve_q_independent,
)

HARMONIC = PotentialSpec.monomial(2)


def test_potential_spec_rejects_negative_exponent():
    with pytest.raises(DomainError):
        PotentialSpec.from_terms({-1: 1.0})


def test_apply_hamiltonian_on_constant():
    f = TruncatedSeries.constant(1.0, 4)
    out = apply_hamiltonian(HamiltonianSpec(HARMONIC), f)
    assert out.to_list() == [0, 0, 1]


@pytest.mark.parametrize("d", [
    Deformation.general(0.5),
    Deformation.unimodular(0.7),
    Deformation.unimodular(2.5),
])
def test_realization_recursion(d):
    assert realization_recursion_residual(d, 50) < 1e-12


def test_phase_space_closure_needs_q_squared():
    d = Deformation.unimodular(0.7)
    out = qcommutator_closure(sqrt_realization(d), d)
    assert out["closes_with_q2"]
    assert not out["closes_with_q"]
    assert out["q2_commutator_is_identity"]


def test_dilation_closes_on_dilation():
    d = Deformation.unimodular(0.7)
    assert qcommutator_closure(dilation_op(d), d)["q2_commutator_is_dilation"]


def test_free_particle_only_linear_solution_survives():
    rec = recursion_invariance(1.0, 1.0, PotentialSpec(()), dilation_op(Deformation.unimodular(0.7)), 10)
    assert "Q(k) != Q(k+2): only the linear solution survives" in rec.flags
    assert rec.f[2:] == [0] * 9


def test_free_particle_at_pi_is_inversion_symmetric():
    rec = recursion_invariance(1.0, 0.0, PotentialSpec(()), dilation_op(Deformation.unimodular(math.pi)), 10)
    assert "Q(k) != Q(k+2): only the linear solution survives" not in rec.flags


def test_gauge_transform_of_harmonic_potential():
    d = Deformation.unimodular(0.7)
    V = gauge_transform_potential(HARMONIC, d)
    assert V.coefficient(2) == pytest.approx(d.q ** 2)


def test_gauge_transform_is_identity_at_q_one():
    V0 = PotentialSpec.from_terms({0: 2.0, 1: 1.0, 3: -4.0})
    assert gauge_transform_potential(V0, Deformation.general(1.0)) == V0


@pytest.mark.parametrize("r", [0.5, 0.7, 0.9])
def test_qprimitive_equals_gauge_at_squared_deformation(r):
    d = Deformation.general(r)
    for k in range(1, 21):
        V0 = PotentialSpec.monomial(k)
        a = qprimitive_transform(V0, d).coefficient(k)
        b = gauge_transform_potential(V0, d.squared()).coefficient(k)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


def test_singular_modes():
    at_pi = Deformation.unimodular(math.pi)
    assert singular_modes(PotentialSpec.monomial(1), at_pi) == []
    assert singular_modes(PotentialSpec.monomial(2), at_pi) == [2]
    assert singular_modes(PotentialSpec.monomial(1), at_pi, include_recursion=True) == [1]


def test_solver_reports_singular_modes():
    with pytest.raises(SingularModeError) as info:
        solve_q_independent(PotentialSpec.monomial(1), 1.0, 0.0, Deformation.unimodular(math.pi), 10)
    assert info.value.modes == [1]


def test_solver_trivial_potential():
    sol = solve_q_independent(PotentialSpec(()), 1.0, 0.0, Deformation.unimodular(0.7), 8)
    assert sol.f == [1, 0, 0, 0, 0, 0, 0, 0, 0]
    assert sol.E == 0


def test_solver_matches_q_free_recursion():
    d = Deformation.unimodular(0.7)
    sol = solve_q_independent(HARMONIC, 1.0, 0.0, d, 20)
    derived = recursion_q_independent_derived(HARMONIC, 1.0, 0.0, 20)
    np.testing.assert_allclose(sol.f, derived, atol=1e-12)
    assert sol.meta["commutant_residual"] < 1e-10


def test_q_independence_sweep():
    sweep = q_independence_sweep(
        HARMONIC, 1.0, 0.0, [Deformation.unimodular(s) for s in (0.3, 1.1, 2.0)], 20
    )
    assert sweep["f_spread"] < 1e-10
    assert sweep["max_commutant_residual"] < 1e-10


def test_solution_lies_in_commutant():
    d = Deformation.unimodular(0.7)
    sol = solve_q_independent(HARMONIC, 1.0, 0.0, d, 20)
    out = commutant_nullspace_distance(sol.f, gauge_transform_potential(HARMONIC, d), dilation_op(d), 12)
    assert out["distance"] < 1e-8


def test_partition_spec_validation():
    with pytest.raises(DomainError):
        PartitionPotentialSpec(0)
    spec = PartitionPotentialSpec(2, B=(1.0,))
    with pytest.raises(DomainError):
        partition_recursion(spec, 2, 1.0, 0.0, 10)


def test_partition_mode_factors():
    factors = partition_mode_factors(PartitionPotentialSpec(2, A=(1.0, 1.0), B=(1.0,)), 1)
    by_family = {(f["family"], f["j"]): f["factor"] for f in factors}
    assert by_family[("A", 1)] == pytest.approx(0)
    assert by_family[("B", 0)] == pytest.approx(2)


def test_partition_scan_single_index():
    scan = partition_scan(PartitionPotentialSpec(2, B=(1.0,)), 1.0, 0.0, 12)
    assert set(scan["runs"]) == {1}
    assert scan["n_spread"] == 0


def test_coulomb_series_coefficients():
    assert coulomb_potential(3).coeffs == (-1, -1, -1, -1)


def test_locate_pole_of_geometric_series():
    lam = 0.8
    pole = locate_pole([-(lam ** k) for k in range(40)])
    assert pole == pytest.approx(1 / lam)


def test_real_mode_pole_drift():
    found = real_pole(Deformation.real(-0.5))
    assert found == pytest.approx(math.exp(0.25), abs=0.01)
    assert predicted_pole(Deformation.real(-0.5)) == pytest.approx(math.exp(0.25))


def test_complex_mode_pole_at_minus_one():
    assert real_pole(Deformation.unimodular(-math.pi)) == pytest.approx(-1.0, abs=0.01)


def test_complex_mode_quarter_turn_eliminates_pole():
    d = Deformation.unimodular(-math.pi / 2)
    assert real_pole(d) is None
    xs = np.linspace(-3.0, 3.0, 121)
    points = deform_coulomb_curve(d, xs, 50)
    re = np.array([p.re_v for p in points])
    np.testing.assert_allclose(re, -1 / (1 + xs ** 2), atol=1e-12)


def test_undeformed_curve():
    xs = [-2.0, 0.0, 0.5, 3.0]
    points = deform_coulomb_curve(Deformation.real(0.0), xs, 50)
    for x, p in zip(xs, points):
        assert p.re_v == pytest.approx(1 / (x - 1))
        assert p.im_v == 0


def test_invariance_residual_vanishes_for_identity_operator():
    f = TruncatedSeries.from_list([1.0, 0.5, -2.0, 0.25, 1.0])
    res = invariance_residual(dilation_op(Deformation.general(1.0)), HamiltonianSpec(HARMONIC), f)
    assert all(c == 0 for c in res.to_list())


def test_partition_potential_exponents():
    V = partition_potential(PartitionPotentialSpec(2, A=(1.0,), B=(2.0,)))
    assert V.coefficient(0) == 1
    assert V.coefficient(2) == 2


def test_coulomb_series_unchanged_at_q_one():
    assert deform_coulomb_series(Deformation.general(1.0), 3) == coulomb_potential(3)


@pytest.mark.parametrize("r", [0.5, 0.7, 0.9])
def test_qprimitive_matches_tail_bounded_jackson_sum(r):
    d = Deformation.general(r)
    V0 = PotentialSpec.from_terms({0: 2.0, 1: 1.0, 3: -4.0})
    x = 0.6
    derivative = differentiate(V0.to_series(V0.degree))
    summed, terms = jackson_partial_sum(derivative, d, d.q * x)
    expected = V0.coefficient(0) + d.q ** 2 * (d.q + 1 / d.q) / 2 * summed
    assert terms > 1
    assert evaluate(qprimitive_transform(V0, d).to_series(V0.degree), x) == pytest.approx(expected, rel=1e-12)


def test_curve_values_follow_closed_form_whatever_the_term_count():
    d = Deformation.real(-0.5)
    lam = curve_scale(d)
    xs = [-1.0, 0.2, 2.0]
    short = deform_coulomb_curve(d, xs, 5)
    long = deform_coulomb_curve(d, xs, 50)
    for x, a, b in zip(xs, short, long):
        expected = 1 / (lam * x - 1)
        assert a.re_v == pytest.approx(expected.real, rel=1e-12)
        assert b.re_v == pytest.approx(expected.real, rel=1e-12)
    # only the flag depends on the partial sums
    assert not short[1].converged
    assert long[1].converged
    assert not long[2].converged


def test_curve_marks_pole_with_nan():
    d = Deformation.real(-0.5)
    pole = predicted_pole(d).real
    point = deform_coulomb_curve(d, [pole], 20)[0]
    assert math.isnan(point.re_v)
    assert not point.converged
