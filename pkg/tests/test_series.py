import numpy as np
import pytest

from qalgebra.errors import DomainError, NVarsMismatchError
from qalgebra.series import (
    TruncatedSeries,
    add,
    differentiate,
    evaluate,
    integrate_axis,
    multiply,
    partial_sums,
    scale_argument,
)


def test_terms_above_order_are_dropped():
    f = TruncatedSeries(1, 3, {(0,): 1, (4,): 5})
    assert f.coefficient(4) == 0
    assert f.to_list() == [1, 0, 0, 0]


def test_exact_zeros_are_not_stored():
    f = TruncatedSeries(2, 4, {(1, 0): 0.0, (0, 1): 2.0})
    assert list(f.coeffs) == [(0, 1)]


@pytest.mark.parametrize("nvars", [0, 4])
def test_nvars_out_of_range(nvars):
    with pytest.raises(DomainError):
        TruncatedSeries(nvars, 2, {})


def test_add_mismatched_nvars():
    with pytest.raises(NVarsMismatchError):
        add(TruncatedSeries.constant(1, 3, nvars=1), TruncatedSeries.constant(1, 3, nvars=2))


def test_multiply_truncates_to_smaller_order():
    f = TruncatedSeries.from_list([1, 1, 1, 1, 1])
    g = TruncatedSeries.from_list([1, -1], order=2)
    h = multiply(f, g)
    assert h.order == 2
    assert h.to_list() == [1, 0, 0]


def test_geometric_series_times_one_minus_x():
    f = TruncatedSeries.from_list([1] * 11)
    h = f * TruncatedSeries.from_list([1, -1], order=10)
    assert h.to_list() == [1] + [0] * 10


def test_multivariate_product():
    x = TruncatedSeries.monomial((1, 0, 0), 4)
    y = TruncatedSeries.monomial((0, 1, 0), 4)
    p = (x + y) * (x + y)
    assert p.coefficient((2, 0, 0)) == 1
    assert p.coefficient((1, 1, 0)) == 2
    assert p.coefficient((0, 2, 0)) == 1


def test_differentiate_and_integrate():
    f = TruncatedSeries.from_list([3, 2, 1, 4])
    assert differentiate(f).to_list() == [2, 2, 12]
    assert differentiate(integrate_axis(f)) == f


def test_differentiate_axis_out_of_range():
    with pytest.raises(DomainError):
        differentiate(TruncatedSeries.constant(1, 2), var=1)


def test_scale_argument():
    f = TruncatedSeries.from_list([1, 1, 1])
    assert scale_argument(f, 0, 2).to_list() == [1, 2, 4]


def test_evaluate_one_and_three_variables():
    f = TruncatedSeries.from_list([1, 2, 3])
    assert evaluate(f, 2.0) == pytest.approx(17)
    g = TruncatedSeries(3, 3, {(1, 1, 1): 2.0, (0, 0, 0): 1.0})
    assert evaluate(g, (1.0, 2.0, 3.0)) == pytest.approx(13)


def test_evaluate_wrong_dimension():
    with pytest.raises(NVarsMismatchError):
        evaluate(TruncatedSeries.constant(1, 2, nvars=2), (1.0,))


def test_partial_sums_running_totals():
    f = TruncatedSeries.from_list([1, 1, 1])
    sums = partial_sums(f, np.array([0.5]))
    np.testing.assert_allclose(sums[0], [1, 1.5, 1.75])
