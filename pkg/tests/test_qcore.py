import math

import pytest

from qalgebra.errors import DegenerateDeformationError, DomainError, NonConvergenceError
from qalgebra.qcore import (
    Deformation,
    exact_expi,
    jackson_derivative_relation,
    jackson_integral,
    jackson_partial_sum,
    q_derivative,
    q_derivative_quotient,
    q_exponential,
    qfactorial,
    qnumber,
)
from qalgebra.series import TruncatedSeries, evaluate


def test_exact_expi_at_quarter_turns():
    assert exact_expi(math.pi) == complex(-1.0, 0.0)
    assert exact_expi(math.pi / 2) == complex(0.0, 1.0)
    assert exact_expi(-math.pi / 2) == complex(0.0, -1.0)


@pytest.mark.parametrize("s", [0.3, 0.7, 2.5])
def test_qnumber_two_is_two_cos(s):
    assert qnumber(2, Deformation.unimodular(s)) == pytest.approx(2 * math.cos(s))


def test_qnumber_limits():
    assert qnumber(5, Deformation.unimodular(0.0)) == 5
    assert qnumber(2, Deformation.unimodular(math.pi)) == -2
    assert qnumber(3, Deformation.unimodular(math.pi)) == 3
    assert qnumber(4, Deformation.general(1.0)) == 4


def test_qnumber_general_q():
    d = Deformation.general(0.5)
    assert qnumber(3, d) == pytest.approx(0.25 + 1 + 4)


def test_qfactorial_degenerate_at_quarter_turn():
    with pytest.raises(DegenerateDeformationError) as info:
        qfactorial(3, Deformation.unimodular(math.pi / 2))
    assert info.value.n == 2


def test_general_rejects_zero():
    with pytest.raises(DomainError):
        Deformation.general(0)


def test_real_deformation_helpers():
    d = Deformation.real(-0.5)
    assert d.q == pytest.approx(math.exp(-0.5))
    assert d.squared().q == pytest.approx(math.exp(-1.0))
    assert d.inverse().q == pytest.approx(math.exp(0.5))


def test_jackson_integral_of_x():
    f = TruncatedSeries.from_list([0, 1])
    out = jackson_integral(f, Deformation.general(0.5))
    assert out.coefficient(2) == pytest.approx(0.4)


def test_jackson_integral_diverges_outside_unit_disc():
    with pytest.raises(NonConvergenceError):
        jackson_integral(TruncatedSeries.from_list([1]), Deformation.general(1.5))


def test_jackson_partial_sum_matches_closed_form():
    f = TruncatedSeries.from_list([0, 0, 1])
    d = Deformation.general(0.5)
    value, terms = jackson_partial_sum(f, d, 0.8)
    closed = evaluate(jackson_integral(f, d), 0.8)
    assert value == pytest.approx(closed, rel=1e-12)
    assert terms > 1


def test_q_derivative_inverts_jackson_integral():
    f = TruncatedSeries.from_list([1, -2, 3, 0.5])
    assert jackson_derivative_relation(f, Deformation.general(0.7)) < 1e-12


def test_q_derivative_agrees_with_quotient():
    d = Deformation.general(0.8)
    f = TruncatedSeries.from_list([1, 2, -1, 3])
    x = 0.6
    series_value = evaluate(q_derivative(f, d), x)
    quotient = q_derivative_quotient(lambda t: evaluate(f, t), d, x)
    assert series_value == pytest.approx(quotient, rel=1e-12)


def test_quotient_undefined_at_q_one():
    with pytest.raises(DomainError):
        q_derivative_quotient(lambda t: t, Deformation.general(1.0), 0.5)


def test_q_exponential_is_eigenfunction():
    d = Deformation.unimodular(0.3)
    k = 1.7
    e = q_exponential(k, d, 12)
    lhs = q_derivative(e, d)
    for n in range(12):
        assert lhs.coefficient(n) == pytest.approx(k * e.coefficient(n), rel=1e-13)
