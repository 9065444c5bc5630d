"""
Dilation operators and Q-realizations
Operators diagonal on monomials: q^{x d/dx}, the square-root realization, the 3D triple and their limits
"""
import cmath
import logging
import math
import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import config
from .errors import DegenerateDeformationError, DomainError, LimitUndefinedError
from .qcore import Deformation, exact_expi, exact_trig, qnumber
from .series import TruncatedSeries, differentiate, integrate_axis

logger = logging.getLogger(__name__)

BRANCHES = ("continuous", "principal")


class DiagonalOperator:
    """
    Operator x^j -> Q(j) x^j along one axis.

    The spectrum is memoized per j; reads are thread-safe.
    """

    def __init__(
        self,
        spectrum: Callable[[int], complex],
        axis: int = 0,
        label: str = "",
        family: str = "custom",
        deformation: Optional[Deformation] = None,
        phase_rate: float = 0.0,
        rebuild: Optional[Callable[[Deformation], "DiagonalOperator"]] = None,
    ):
        self._spectrum = spectrum
        self.axis = axis
        self.label = label
        self.family = family
        self.deformation = deformation
        self.phase_rate = phase_rate
        self.rebuild = rebuild
        self._cache: Dict[int, complex] = {}
        self._lock = threading.Lock()

    def spectrum(self, j: int) -> complex:
        with self._lock:
            if j in self._cache:
                return self._cache[j]
        value = complex(self._spectrum(j))
        with self._lock:
            self._cache.setdefault(j, value)
        return value

    __call__ = spectrum

    def values(self, n: int) -> List[complex]:
        """Q(0) .. Q(n-1)"""
        return [self.spectrum(j) for j in range(n)]

    def apply(self, f: TruncatedSeries) -> TruncatedSeries:
        if self.axis >= f.nvars:
            raise DomainError(f"operator axis {self.axis} outside nvars={f.nvars}")
        return f.map_coefficients(lambda k, v: v * self.spectrum(k[self.axis]))

    def compose(self, other: "DiagonalOperator") -> "DiagonalOperator":
        if other.axis != self.axis:
            raise DomainError("composition needs operators on the same axis")
        return DiagonalOperator(
            lambda j: self.spectrum(j) * other.spectrum(j),
            axis=self.axis,
            label=f"({self.label})*({other.label})",
        )

    def __repr__(self):
        return f"DiagonalOperator({self.label or self.family}, axis={self.axis})"


def identity_op(axis: int = 0) -> DiagonalOperator:
    return DiagonalOperator(lambda j: 1.0, axis=axis, label="identity", family="identity")


def inversion_op(axis: int = 0) -> DiagonalOperator:
    return DiagonalOperator(lambda j: (-1.0) ** j, axis=axis, label="inversion", family="inversion")


def dilation_op(d: Deformation, axis: int = 0) -> DiagonalOperator:
    """q^{x d/dx}: x^j -> q^j x^j"""
    return DiagonalOperator(
        lambda j: d.power(j),
        axis=axis,
        label=f"dilation {d.label()}",
        family="dilation",
        deformation=d,
        phase_rate=1.0,
        rebuild=lambda d2: dilation_op(d2, axis),
    )


def realization_square(j: int, d: Deformation) -> complex:
    """Q^2(j) = q^j [j+1] / (j+1)"""
    return d.power(j) * qnumber(j + 1, d) / (j + 1)


def _quarter_turns(j: int, s: float) -> int:
    """Sign changes of sin((j+1)t)/sin(t) for t in (0, s)"""
    t = s * (j + 1) / math.pi
    nearest = round(t)
    last = nearest - 1 if abs(t - nearest) < config.TRIG_SNAP_TOL else math.floor(t)
    last = max(last, 0)
    return last - last // (j + 1)


def _continuous_root(j: int, d: Deformation) -> complex:
    s = d.s
    if s < 0:
        return _continuous_root(j, Deformation.unimodular(-s)).conjugate()
    ratio = qnumber(j + 1, d).real / (j + 1)
    m = _quarter_turns(j, s)
    c, sn = exact_trig(m * math.pi / 2)
    return exact_expi(s * j / 2) * complex(c, sn) * math.sqrt(abs(ratio))


def _principal_root(j: int, d: Deformation) -> complex:
    return cmath.sqrt(realization_square(j, d))


def _root(j: int, d: Deformation, branch: str) -> complex:
    if branch == "continuous" and d.is_unimodular:
        return _continuous_root(j, d)
    return _principal_root(j, d)


def sqrt_realization(d: Deformation, branch: str = "continuous", axis: int = 0,
                     strict: bool = True) -> DiagonalOperator:
    """
    Coordinate realization with Q^2(j) = q^j [j+1]/(j+1).

    branch="continuous" follows s -> Q(j, s) from s = 0 (one quarter turn per
    simple zero of [j+1]); branch="principal" takes the principal root of Q^2.
    With strict=True a vanishing [j+1] raises instead of giving Q(j) = 0.
    """
    if branch not in BRANCHES:
        raise DomainError(f"unknown branch {branch!r}")

    def spectrum(j: int) -> complex:
        if strict and abs(qnumber(j + 1, d)) < config.ROOT_OF_UNITY_TOL:
            raise DegenerateDeformationError(j + 1)
        return _root(j, d, branch)

    return DiagonalOperator(
        spectrum,
        axis=axis,
        label=f"sqrt realization ({branch}) {d.label()}",
        family="sqrt",
        deformation=d,
        phase_rate=0.5,
        rebuild=lambda d2: sqrt_realization(d2, branch, axis, strict),
    )


def integral_action_op(d: Deformation, axis: int = 0) -> DiagonalOperator:
    """
    Spectrum of the operator f -> (F(q^2 x) - F(x)) / (q (q - 1/q) x), F the primitive of f.
    On x^j this gives q^j [j+1]/(j+1), the square of the coordinate realization.
    """
    return DiagonalOperator(
        lambda j: realization_square(j, d),
        axis=axis,
        label=f"integral action {d.label()}",
        family="integral-action",
        deformation=d,
        phase_rate=1.0,
        rebuild=lambda d2: integral_action_op(d2, axis),
    )


def integral_action(f: TruncatedSeries, d: Deformation) -> TruncatedSeries:
    """The integral/difference formula applied literally to a one-variable series"""
    q = d.q
    denom = q * (q - 1 / q)
    if abs(denom) < config.ROOT_OF_UNITY_TOL:
        raise DomainError("formula degenerates at q = +-1; use integral_action_op")
    primitive = integrate_axis(f, 0)
    lam = d.power(2)
    shifted = primitive.map_coefficients(lambda k, v: v * (lam ** k[0] - 1))
    coeffs = {(j - 1,): v / denom for (j,), v in shifted.coeffs.items() if j > 0}
    return TruncatedSeries(1, f.order, coeffs, f.prune_tol)


def deformed_derivative(op: DiagonalOperator, f: TruncatedSeries) -> TruncatedSeries:
    """d-hat = Q d along the operator's axis"""
    return op.apply(differentiate(f, op.axis))


def limit_spectrum(op: DiagonalOperator, s0: float) -> DiagonalOperator:
    """Rebuild a unimodular family exactly at s0 (analytic limits of the q-numbers)"""
    if op.rebuild is None:
        raise DomainError(f"operator {op!r} has no family to take a limit of")
    endpoint = op.rebuild(Deformation.unimodular(s0))

    def spectrum(j: int) -> complex:
        try:
            value = endpoint.spectrum(j)
        except (ZeroDivisionError, OverflowError, DegenerateDeformationError) as e:
            raise LimitUndefinedError(j, s0) from e
        if not cmath.isfinite(value):
            raise LimitUndefinedError(j, s0)
        return value

    return DiagonalOperator(
        spectrum,
        axis=op.axis,
        label=f"{op.family} limit s->{s0:.6g}",
        family=op.family,
        deformation=Deformation.unimodular(s0),
        phase_rate=op.phase_rate,
        rebuild=op.rebuild,
    )


def first_order_expansion(op: DiagonalOperator, s0: float, eps: float) -> DiagonalOperator:
    """
    Endpoint value times (1 +- i eps rate j); + at s ~ 0 with eps = s,
    - at s ~ pi with eps = pi - s.
    """
    if op.phase_rate == 0.0:
        raise DomainError(f"operator {op!r} has no first-order phase rate")
    if abs(s0) < config.TRIG_SNAP_TOL:
        sign = 1.0
    elif abs(s0 - math.pi) < config.TRIG_SNAP_TOL:
        sign = -1.0
    else:
        raise DomainError("first-order expansion is defined about s = 0 or s = pi")
    endpoint = limit_spectrum(op, s0)
    rate = op.phase_rate
    return DiagonalOperator(
        lambda j: endpoint.spectrum(j) * (1 + sign * 1j * eps * rate * j),
        axis=op.axis,
        label=f"{op.family} first order about s={s0:.6g}, eps={eps:g}",
        family=f"{op.family}-first-order",
    )


def first_order_residual(op_family: Callable[[Deformation], DiagonalOperator], s0: float,
                         eps: float, max_j: int = 10) -> float:
    """max_j |Q(j, s) - expansion(j)| / eps^2 with s = eps or pi - eps"""
    s = eps if s0 == 0 else math.pi - eps
    exact = op_family(Deformation.unimodular(s))
    approx = first_order_expansion(exact, s0, eps)
    worst = max(abs(exact.spectrum(j) - approx.spectrum(j)) for j in range(max_j + 1))
    return worst / eps ** 2


class MonomialOperator:
    """Operator diagonal on x^a y^b z^c with factor(a, b, c)"""

    def __init__(self, factor: Callable[[Tuple[int, ...]], complex], label: str = ""):
        self._factor = factor
        self.label = label
        self._cache: Dict[Tuple[int, ...], complex] = {}
        self._lock = threading.Lock()

    def factor(self, exponent: Sequence[int]) -> complex:
        key = tuple(int(e) for e in exponent)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = complex(self._factor(key))
        with self._lock:
            self._cache.setdefault(key, value)
        return value

    def apply(self, f: TruncatedSeries) -> TruncatedSeries:
        if f.nvars != 3:
            raise DomainError("3D operators act on three-variable series")
        return f.map_coefficients(lambda k, v: v * self.factor(k))

    def __repr__(self):
        return f"MonomialOperator({self.label})"


@dataclass
class Q3Realization:
    """The commuting triple (Q_x, Q_y, Q_z)"""
    qx: MonomialOperator
    qy: MonomialOperator
    qz: MonomialOperator
    deformation: Deformation
    branch: str

    @property
    def operators(self) -> Tuple[MonomialOperator, MonomialOperator, MonomialOperator]:
        return (self.qx, self.qy, self.qz)

    def coordinate_action(self) -> Dict[str, Tuple[complex, complex, complex]]:
        """Images of (x, y, z) under each operator, as multipliers"""
        units = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        return {
            name: tuple(op.factor(u) for u in units)
            for name, op in zip(("Qx", "Qy", "Qz"), self.operators)
        }

    def commutator_defect(self, max_degree: int) -> float:
        """Largest |AB - BA| factor over all monomials up to max_degree"""
        worst = 0.0
        for a in range(max_degree + 1):
            for b in range(max_degree + 1 - a):
                for c in range(max_degree + 1 - a - b):
                    e = (a, b, c)
                    vals = [op.factor(e) for op in self.operators]
                    for i in range(3):
                        for k in range(i + 1, 3):
                            worst = max(worst, abs(vals[i] * vals[k] - vals[k] * vals[i]))
        return worst

    def deformed_derivative(self, axis: int, f: TruncatedSeries) -> TruncatedSeries:
        """d-hat_i = Q_i d_i on a three-variable series"""
        return self.operators[axis].apply(differentiate(f, axis))

    # ----- deformed coordinates and derivatives on monomials -----

    def _step(self, letter: Tuple[str, int], exponent: Tuple[int, ...]) -> Optional[Tuple[complex, Tuple[int, ...]]]:
        kind, i = letter
        e = list(exponent)
        if kind == "x":
            c = self.operators[i].factor(e)
            e[i] += 1
            return c, tuple(e)
        if e[i] == 0:
            return None
        n = e[i]
        e[i] -= 1
        return n * self.operators[i].factor(e), tuple(e)

    def apply_word(self, word: Sequence[Tuple[str, int]], exponent: Tuple[int, ...]) -> Dict[Tuple[int, ...], complex]:
        """Product of x-hat ("x", i) and d-hat ("d", i) letters on x^exponent, rightmost first"""
        c, e = 1 + 0j, tuple(exponent)
        for letter in reversed(word):
            step = self._step(letter, e)
            if step is None:
                return {}
            factor, e = step
            c *= factor
        return {e: c}

    def relation_defects(self, max_degree: int = 4) -> Dict[str, float]:
        """
        Largest coefficient of each exchange relation over monomials up to max_degree:
          xx:  x_i x_j - q x_j x_i (i < j)
          dx:  d_i x_j - q x_j d_i (i != j)
          dd:  d_i d_j - q^-1 d_j d_i (i < j)
          dxi: d_i x_i - q^2 x_i d_i - 1 - (q^2 - 1) sum_{j > i} x_j d_j
          dx_swapped: d_i x_j - q d_j x_i (i != j)
        """
        q = self.deformation.q
        q2 = self.deformation.power(2)
        relations: Dict[str, List[List[Tuple[complex, List[Tuple[str, int]]]]]] = {
            "xx": [], "dx": [], "dd": [], "dxi": [], "dx_swapped": [],
        }
        for i in range(3):
            for j in range(3):
                if i < j:
                    relations["xx"].append([(1, [("x", i), ("x", j)]), (-q, [("x", j), ("x", i)])])
                    relations["dd"].append([(1, [("d", i), ("d", j)]), (-1 / q, [("d", j), ("d", i)])])
                if i != j:
                    relations["dx"].append([(1, [("d", i), ("x", j)]), (-q, [("x", j), ("d", i)])])
                    relations["dx_swapped"].append([(1, [("d", i), ("x", j)]), (-q, [("d", j), ("x", i)])])
            same = [(1, [("d", i), ("x", i)]), (-q2, [("x", i), ("d", i)]), (-1, [])]
            same += [(-(q2 - 1), [("x", j), ("d", j)]) for j in range(i + 1, 3)]
            relations["dxi"].append(same)

        defects = {name: 0.0 for name in relations}
        for a in range(max_degree + 1):
            for b in range(max_degree + 1 - a):
                for c in range(max_degree + 1 - a - b):
                    e = (a, b, c)
                    for name, rels in relations.items():
                        for rel in rels:
                            total: Dict[Tuple[int, ...], complex] = {}
                            for coeff, word in rel:
                                for key, val in self.apply_word(word, e).items():
                                    total[key] = total.get(key, 0j) + coeff * val
                            worst = max((abs(v) for v in total.values()), default=0.0)
                            defects[name] = max(defects[name], worst)
        return defects


def q3_realization(d: Deformation, branch: str = "principal") -> Q3Realization:
    """
    Q_x = Q(d_x) q^{d_y + d_z}, Q_y = Q(d_y) q^{d_z}, Q_z = Q(d_z) with
    Q(j) = q^{j/2} ([j+1]/(j+1))^{1/2}. Vanishing [j+1] gives a zero factor.
    """
    if branch not in BRANCHES:
        raise DomainError(f"unknown branch {branch!r}")

    def root(j: int) -> complex:
        if abs(qnumber(j + 1, d)) < config.ROOT_OF_UNITY_TOL:
            return 0j
        return _root(j, d, branch)

    qx = MonomialOperator(lambda e: root(e[0]) * d.power(e[1] + e[2]), f"Qx {d.label()}")
    qy = MonomialOperator(lambda e: root(e[1]) * d.power(e[2]), f"Qy {d.label()}")
    qz = MonomialOperator(lambda e: root(e[2]), f"Qz {d.label()}")
    return Q3Realization(qx, qy, qz, d, branch)
