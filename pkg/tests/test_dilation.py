import math

import pytest

from qalgebra.dilation import (
    DiagonalOperator,
    dilation_op,
    first_order_expansion,
    first_order_residual,
    integral_action,
    integral_action_op,
    limit_spectrum,
    q3_realization,
    realization_square,
    sqrt_realization,
)
from qalgebra.errors import DegenerateDeformationError, DomainError
from qalgebra.qcore import Deformation
from qalgebra.series import TruncatedSeries


@pytest.mark.parametrize("s", [0.7, 2.5, -1.2])
def test_degree_one_square(s):
    d = Deformation.unimodular(s)
    Q = sqrt_realization(d)
    assert Q.spectrum(1) ** 2 == pytest.approx((1 + d.q ** 2) / 2, abs=1e-14)
    assert realization_square(1, d) == pytest.approx((1 + d.q ** 2) / 2, abs=1e-14)


@pytest.mark.parametrize("branch", ["continuous", "principal"])
def test_square_of_realization_matches_formula(branch):
    d = Deformation.unimodular(0.7)
    Q = sqrt_realization(d, branch)
    for j in range(12):
        assert Q.spectrum(j) ** 2 == pytest.approx(realization_square(j, d), abs=1e-13)


def test_continuous_branch_limit_at_pi_is_inversion():
    Q = limit_spectrum(sqrt_realization(Deformation.unimodular(0.5)), math.pi)
    assert [Q.spectrum(j) for j in range(31)] == [(-1) ** j for j in range(31)]


def test_dilation_limits():
    at_pi = limit_spectrum(dilation_op(Deformation.unimodular(0.2)), math.pi)
    assert at_pi.values(4) == [1, -1, 1, -1]
    at_zero = limit_spectrum(dilation_op(Deformation.unimodular(0.2)), 0.0)
    assert at_zero.values(4) == [1, 1, 1, 1]


def test_strict_realization_rejects_vanishing_qnumber():
    Q = sqrt_realization(Deformation.unimodular(math.pi / 2))
    with pytest.raises(DegenerateDeformationError):
        Q.spectrum(1)


def test_limit_needs_a_family():
    op = DiagonalOperator(lambda j: 1.0)
    with pytest.raises(DomainError):
        limit_spectrum(op, math.pi)


def test_integral_action_is_square_of_realization():
    d = Deformation.general(0.7)
    f = TruncatedSeries.from_list([1, -2, 0.5, 3])
    literal = integral_action(f, d)
    diagonal = integral_action_op(d).apply(f)
    assert literal.max_abs_diff(diagonal) < 1e-12


def test_first_order_expansion_about_zero():
    eps = 1e-3
    op = sqrt_realization(Deformation.unimodular(eps))
    approx = first_order_expansion(op, 0.0, eps)
    for j in range(6):
        assert abs(op.spectrum(j) - approx.spectrum(j)) < 10 * eps ** 2 * (j + 1) ** 2


def test_first_order_residual_is_bounded():
    coarse = first_order_residual(dilation_op, 0.0, 1e-3)
    fine = first_order_residual(dilation_op, 0.0, 5e-4)
    assert fine <= 2 * coarse + 1e-6


def test_first_order_expansion_rejects_generic_point():
    with pytest.raises(DomainError):
        first_order_expansion(dilation_op(Deformation.unimodular(0.3)), 1.0, 1e-3)


def test_q3_tables_at_pi():
    table = q3_realization(Deformation.unimodular(math.pi)).coordinate_action()
    assert table["Qx"] == pytest.approx((1, -1, -1))
    assert table["Qy"] == pytest.approx((1, 1, -1))
    assert table["Qz"] == pytest.approx((1, 1, 1))


def test_q3_tables_at_half_pi():
    table = q3_realization(Deformation.unimodular(math.pi / 2)).coordinate_action()
    assert table["Qx"] == pytest.approx((0, 1j, 1j))
    assert table["Qy"] == pytest.approx((1, 0, 1j))
    assert table["Qz"] == pytest.approx((1, 1, 0))


def test_q3_operators_commute():
    assert q3_realization(Deformation.unimodular(0.7)).commutator_defect(5) == 0


def test_q3_exchange_relations():
    defects = q3_realization(Deformation.unimodular(0.7)).relation_defects(3)
    for name in ("xx", "dx", "dd", "dxi"):
        assert defects[name] < 1e-10, name
    assert defects["dx_swapped"] > 1e-3
