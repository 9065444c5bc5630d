"""
Truncated power series
Complex-coefficient series in one to three commuting variables with an explicit truncation order
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, NVarsMismatchError

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """
    Sparse map from exponent multi-index to complex coefficient.

    Only terms with total degree <= order are kept; exact zeros are dropped,
    and so is anything with magnitude below prune_tol when it is positive.
    """
    nvars: int
    order: int
    coeffs: Mapping[MultiIndex, complex] = field(default_factory=dict)
    prune_tol: float = 0.0

    def __post_init__(self):
        if not 1 <= self.nvars <= 3:
            raise DomainError(f"nvars must be 1..3, got {self.nvars}")
        if self.order < 0:
            raise DomainError(f"order must be non-negative, got {self.order}")
        clean: Dict[MultiIndex, complex] = {}
        for idx, value in self.coeffs.items():
            idx = (idx,) if isinstance(idx, (int, np.integer)) else tuple(int(e) for e in idx)
            if len(idx) != self.nvars or any(e < 0 for e in idx):
                raise DomainError(f"bad exponent {idx} for nvars={self.nvars}")
            if sum(idx) > self.order:
                continue
            value = complex(value)
            if value == 0 or abs(value) < self.prune_tol:
                continue
            clean[idx] = clean.get(idx, 0j) + value
        object.__setattr__(self, "coeffs", clean)

    # ----- constructors -----

    @classmethod
    def from_list(cls, values: Sequence[complex], order: Optional[int] = None) -> "TruncatedSeries":
        """One-variable series from a dense coefficient list"""
        if order is None:
            order = max(len(values) - 1, 0)
        return cls(1, order, {(j,): v for j, v in enumerate(values)})

    @classmethod
    def monomial(cls, exponent: Iterable[int], order: int, coeff: complex = 1.0) -> "TruncatedSeries":
        idx = tuple(exponent)
        return cls(len(idx), order, {idx: coeff})

    @classmethod
    def constant(cls, value: complex, order: int, nvars: int = 1) -> "TruncatedSeries":
        return cls(nvars, order, {(0,) * nvars: value})

    @classmethod
    def zero(cls, order: int, nvars: int = 1) -> "TruncatedSeries":
        return cls(nvars, order, {})

    # ----- accessors -----

    def coefficient(self, idx) -> complex:
        if isinstance(idx, (int, np.integer)):
            idx = (int(idx),)
        return self.coeffs.get(tuple(idx), 0j)

    def to_list(self) -> List[complex]:
        """Dense coefficient list of a one-variable series, length order + 1"""
        if self.nvars != 1:
            raise DomainError("to_list needs a one-variable series")
        out = [0j] * (self.order + 1)
        for (j,), value in self.coeffs.items():
            out[j] = value
        return out

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.coeffs.values())

    def max_abs_diff(self, other: "TruncatedSeries") -> float:
        _check_nvars(self, other)
        keys = set(self.coeffs) | set(other.coeffs)
        if not keys:
            return 0.0
        return max(abs(self.coefficient(k) - other.coefficient(k)) for k in keys)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.nvars, min(order, self.order), self.coeffs, self.prune_tol)

    def map_coefficients(self, fn) -> "TruncatedSeries":
        """Apply fn(index, value) to every stored term"""
        return TruncatedSeries(
            self.nvars, self.order, {k: fn(k, v) for k, v in self.coeffs.items()}, self.prune_tol
        )

    # ----- operators -----

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return add(self, other)
        return add(self, TruncatedSeries.constant(other, self.order, self.nvars))

    __radd__ = __add__

    def __neg__(self):
        return self.map_coefficients(lambda _, v: -v)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return multiply(self, other)
        scalar = complex(other)
        return self.map_coefficients(lambda _, v: v * scalar)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.nvars == other.nvars and self.order == other.order and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        terms = sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        shown = " + ".join(f"({v:.6g})*{_fmt_monomial(k)}" for k, v in terms[:8]) or "0"
        more = " + ..." if len(terms) > 8 else ""
        return f"TruncatedSeries(nvars={self.nvars}, order={self.order}: {shown}{more})"


def _fmt_monomial(idx: MultiIndex) -> str:
    names = "xyz"
    parts = [f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(idx) if e]
    return "*".join(parts) or "1"


def _check_nvars(f: TruncatedSeries, g: TruncatedSeries):
    if f.nvars != g.nvars:
        raise NVarsMismatchError(f.nvars, g.nvars)


def add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Coefficient-wise sum truncated to the smaller order"""
    _check_nvars(f, g)
    order = min(f.order, g.order)
    out: Dict[MultiIndex, complex] = dict(f.coeffs)
    for k, v in g.coeffs.items():
        out[k] = out.get(k, 0j) + v
    return TruncatedSeries(f.nvars, order, out, max(f.prune_tol, g.prune_tol))


def multiply(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated to the smaller order"""
    _check_nvars(f, g)
    order = min(f.order, g.order)
    out: Dict[MultiIndex, complex] = {}
    g_items = [(k, v, sum(k)) for k, v in g.coeffs.items()]
    for kf, vf in f.coeffs.items():
        df = sum(kf)
        if df > order:
            continue
        for kg, vg, dg in g_items:
            if df + dg > order:
                continue
            key = tuple(a + b for a, b in zip(kf, kg))
            out[key] = out.get(key, 0j) + vf * vg
    return TruncatedSeries(f.nvars, order, out, max(f.prune_tol, g.prune_tol))


def differentiate(f: TruncatedSeries, var: int = 0) -> TruncatedSeries:
    """Term-wise partial derivative; the order drops by one"""
    if not 0 <= var < f.nvars:
        raise DomainError(f"axis {var} out of range for nvars={f.nvars}")
    out: Dict[MultiIndex, complex] = {}
    for k, v in f.coeffs.items():
        if k[var] == 0:
            continue
        key = k[:var] + (k[var] - 1,) + k[var + 1:]
        out[key] = v * k[var]
    return TruncatedSeries(f.nvars, max(f.order - 1, 0), out, f.prune_tol)


def integrate_axis(f: TruncatedSeries, var: int = 0) -> TruncatedSeries:
    """Term-wise primitive with zero constant; the order rises by one"""
    if not 0 <= var < f.nvars:
        raise DomainError(f"axis {var} out of range for nvars={f.nvars}")
    out: Dict[MultiIndex, complex] = {}
    for k, v in f.coeffs.items():
        key = k[:var] + (k[var] + 1,) + k[var + 1:]
        out[key] = v / (k[var] + 1)
    return TruncatedSeries(f.nvars, f.order + 1, out, f.prune_tol)


def scale_argument(f: TruncatedSeries, var: int, lam: complex) -> TruncatedSeries:
    """x_var -> lam * x_var, i.e. the coefficient of x^j picks up lam^j"""
    if not 0 <= var < f.nvars:
        raise DomainError(f"axis {var} out of range for nvars={f.nvars}")
    lam = complex(lam)
    return f.map_coefficients(lambda k, v: v * lam ** k[var])


def evaluate(f: TruncatedSeries, point) -> complex:
    """Value of the truncated sum at a point (Horner in one variable)"""
    point = np.atleast_1d(np.asarray(point, dtype=complex))
    if point.shape[0] != f.nvars:
        raise NVarsMismatchError(f.nvars, point.shape[0])
    if f.nvars == 1:
        acc = 0j
        x = complex(point[0])
        for c in reversed(f.to_list()):
            acc = acc * x + c
        return acc
    total = 0j
    for k, v in f.coeffs.items():
        term = v
        for xi, e in zip(point, k):
            term *= complex(xi) ** e
        total += term
    return total


def partial_sums(f: TruncatedSeries, x) -> np.ndarray:
    """Running partial sums S_0..S_order of a one-variable series at the points x"""
    x = np.asarray(x, dtype=complex)
    coeffs = np.asarray(f.to_list(), dtype=complex)
    powers = np.power.outer(x, np.arange(f.order + 1))
    return np.cumsum(powers * coeffs, axis=-1)
