"""
q-calculus core
Deformation parameter, symmetric q-numbers, q-derivative, Jackson q-integral and q-exponential
"""
import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import config
from .errors import DegenerateDeformationError, DomainError, NonConvergenceError
from .series import TruncatedSeries

logger = logging.getLogger(__name__)

_HALF_PI = math.pi / 2
# cos/sin of m*pi/2 for m mod 4
_QUARTER_TABLE = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


def exact_trig(theta: float) -> Tuple[float, float]:
    """(cos, sin) with exact values at integer multiples of pi/2"""
    m = theta / _HALF_PI
    nearest = round(m)
    if abs(m - nearest) < config.TRIG_SNAP_TOL:
        return _QUARTER_TABLE[int(nearest) % 4]
    return math.cos(theta), math.sin(theta)


def exact_expi(theta: float) -> complex:
    c, s = exact_trig(theta)
    return complex(c, s)


@dataclass(frozen=True)
class Deformation:
    """
    The deformation parameter q.

    mode "unimodular" stores the angle s with q = e^{is}; mode "general" stores q.
    Real deformations q = e^s are general deformations that remember s.
    """
    mode: str
    s: Optional[float] = None
    q_value: complex = 1.0 + 0j

    @classmethod
    def unimodular(cls, s: float) -> "Deformation":
        return cls("unimodular", float(s), exact_expi(float(s)))

    @classmethod
    def general(cls, q: complex) -> "Deformation":
        q = complex(q)
        if q == 0:
            raise DomainError("q must be nonzero")
        return cls("general", None, q)

    @classmethod
    def real(cls, s: float) -> "Deformation":
        """q = e^s, the convention of the real-deformation figure"""
        return cls("general", float(s), complex(math.exp(s), 0.0))

    @property
    def q(self) -> complex:
        return self.q_value

    @property
    def is_unimodular(self) -> bool:
        return self.mode == "unimodular"

    def power(self, t: float) -> complex:
        """q^t; exact on the unit circle, principal branch otherwise"""
        if self.is_unimodular:
            return exact_expi(self.s * t)
        if self.s is not None:
            return complex(math.exp(self.s * t), 0.0)
        return self.q_value ** t

    def is_root_of_unity(self, n: int) -> bool:
        return abs(self.power(n) - 1) < config.ROOT_OF_UNITY_TOL

    def squared(self) -> "Deformation":
        if self.is_unimodular:
            return Deformation.unimodular(2 * self.s)
        if self.s is not None:
            return Deformation.real(2 * self.s)
        return Deformation.general(self.q_value ** 2)

    def inverse(self) -> "Deformation":
        if self.is_unimodular:
            return Deformation.unimodular(-self.s)
        if self.s is not None:
            return Deformation.real(-self.s)
        return Deformation.general(1 / self.q_value)

    def label(self) -> str:
        if self.is_unimodular:
            return f"q=e^(i*{self.s:.6g})"
        if self.s is not None:
            return f"q=e^({self.s:.6g})"
        return f"q={self.q_value:.6g}"


def qnumber(n: float, d: Deformation) -> complex:
    """Symmetric q-number [n] = (q^n - q^-n)/(q - q^-1), with analytic limits at q = +-1"""
    if d.is_unimodular:
        cos_s, sin_s = exact_trig(d.s)
        cos_sn, sin_sn = exact_trig(d.s * n)
        if sin_s == 0.0:
            # L'Hopital at s in pi*Z
            return complex(n * cos_sn / cos_s)
        return complex(sin_sn / sin_s)
    q = d.q
    if abs(q * q - 1) < config.ROOT_OF_UNITY_TOL:
        theta = 0.0 if q.real > 0 else math.pi
        return complex(n * exact_trig(theta * n)[0] / exact_trig(theta)[0])
    qn = d.power(n)
    return (qn - 1 / qn) / (q - 1 / q)


def qfactorial(n: int, d: Deformation) -> complex:
    result = 1 + 0j
    for m in range(1, n + 1):
        value = qnumber(m, d)
        if abs(value) < config.ROOT_OF_UNITY_TOL:
            raise DegenerateDeformationError(m)
        result *= value
    return result


def q_derivative(f: TruncatedSeries, d: Deformation) -> TruncatedSeries:
    """D_q term-wise: x^n -> [n] x^(n-1)"""
    if f.nvars != 1:
        raise DomainError("q_derivative needs a one-variable series")
    coeffs = {(n - 1,): v * qnumber(n, d) for (n,), v in f.coeffs.items() if n > 0}
    return TruncatedSeries(1, max(f.order - 1, 0), coeffs, f.prune_tol)


def q_derivative_quotient(fn: Callable[[complex], complex], d: Deformation, x: complex) -> complex:
    """The defining finite-difference quotient (f(qx) - f(x/q)) / ((q - 1/q) x)"""
    q = d.q
    if abs(q - 1 / q) < config.ROOT_OF_UNITY_TOL:
        raise DomainError("quotient is undefined at q = +-1; use q_derivative")
    return (fn(q * x) - fn(x / q)) / ((q - 1 / q) * x)


def _require_contraction(d: Deformation):
    if abs(d.q) >= 1:
        raise NonConvergenceError(f"Jackson sum diverges for |q| = {abs(d.q):.6g} >= 1")


def jackson_integral(f: TruncatedSeries, d: Deformation) -> TruncatedSeries:
    """
    Closed form of (1/q - q) x sum_n q^(2n+1) f(q^(2n+1) x):
    x^(k-1) -> (1/q - q) q^k / (1 - q^(2k)) x^k, which equals x^k / [k].
    """
    if f.nvars != 1:
        raise DomainError("jackson_integral needs a one-variable series")
    _require_contraction(d)
    q = d.q
    coeffs = {}
    for (j,), v in f.coeffs.items():
        k = j + 1
        coeffs[(k,)] = v * (1 / q - q) * q ** k / (1 - q ** (2 * k))
    return TruncatedSeries(1, f.order + 1, coeffs, f.prune_tol)


def jackson_partial_sum(f: TruncatedSeries, d: Deformation, x: complex,
                        tail_tol: Optional[float] = None, max_terms: int = 100000) -> Tuple[complex, int]:
    """
    Evaluate the defining Jackson sum at a point, stopping once the geometric
    tail bound drops below tail_tol. Returns (value, terms used).
    """
    _require_contraction(d)
    tail_tol = config.JACKSON_TAIL_TOL if tail_tol is None else tail_tol
    q = d.q
    x = complex(x)
    prefactor = (1 / q - q) * x
    bound_f = sum(abs(v) * abs(x) ** j for (j,), v in f.coeffs.items())
    ratio = abs(q) ** 2
    total = 0j
    point = q * x
    weight = q
    for n in range(max_terms):
        total += weight * _horner(f, point)
        # remaining terms are bounded by |pref| M |q|^(2n+3) / (1 - |q|^2)
        tail = abs(prefactor) * bound_f * abs(q) ** (2 * n + 3) / (1 - ratio)
        if tail < tail_tol:
            return prefactor * total, n + 1
        point *= q * q
        weight *= q * q
    raise NonConvergenceError(f"Jackson sum not converged after {max_terms} terms")


def _horner(f: TruncatedSeries, x: complex) -> complex:
    acc = 0j
    for c in reversed(f.to_list()):
        acc = acc * x + c
    return acc


def q_exponential(k: complex, d: Deformation, order: int) -> TruncatedSeries:
    """e_q(kx) = sum k^n x^n / [n]!, the eigenfunction of D_q"""
    coeffs = {(0,): 1 + 0j}
    c = 1 + 0j
    k = complex(k)
    for n in range(1, order + 1):
        qn = qnumber(n, d)
        if abs(qn) < config.ROOT_OF_UNITY_TOL:
            raise DegenerateDeformationError(n)
        c = c * k / qn
        coeffs[(n,)] = c
    return TruncatedSeries(1, order, coeffs)


def jackson_derivative_relation(f: TruncatedSeries, d: Deformation) -> float:
    """Max coefficient deviation of D_q(J f) from f; zero means no rescaling appears"""
    back = q_derivative(jackson_integral(f, d), d)
    return back.max_abs_diff(f.truncate(back.order))
