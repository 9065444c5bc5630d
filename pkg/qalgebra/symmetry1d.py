"""
One-dimensional invariance machinery
Hamiltonians commuting with Q-operators, invariance recursions, the gauge-like potential
transformation, the q-independent solver, partition potentials and the deformed Coulomb curves
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

import config
from .dilation import DiagonalOperator, dilation_op, realization_square
from .errors import DomainError, NonConvergenceError, SingularModeError
from .qcore import Deformation, jackson_integral
from .series import TruncatedSeries, differentiate, partial_sums, scale_argument

logger = logging.getLogger(__name__)


# =====================================================================
# Types
# =====================================================================

@dataclass(frozen=True)
class PotentialSpec:
    """V(x) = sum_k V_k x^k with finite support"""
    coeffs: Tuple[complex, ...] = ()

    @classmethod
    def from_terms(cls, terms: Mapping[int, complex]) -> "PotentialSpec":
        if not terms:
            return cls(())
        if min(terms) < 0:
            raise DomainError("potential exponents must be non-negative")
        out = [0j] * (max(terms) + 1)
        for k, v in terms.items():
            out[k] += complex(v)
        return cls(tuple(out))

    @classmethod
    def monomial(cls, n: int, coeff: complex = 1.0) -> "PotentialSpec":
        return cls.from_terms({n: coeff})

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> complex:
        return complex(self.coeffs[k]) if 0 <= k < len(self.coeffs) else 0j

    def support(self) -> List[int]:
        return [k for k, v in enumerate(self.coeffs) if v != 0]

    def is_zero(self) -> bool:
        return not self.support()

    def to_series(self, order: int) -> TruncatedSeries:
        return TruncatedSeries(1, order, {(k,): v for k, v in enumerate(self.coeffs)})

    @classmethod
    def from_series(cls, f: TruncatedSeries) -> "PotentialSpec":
        return cls(tuple(f.to_list()))


@dataclass
class HamiltonianSpec:
    """H = -d^2/dx^2 + V(x) + W(x d/dx)"""
    potential: PotentialSpec = field(default_factory=PotentialSpec)
    W: Optional[Callable[[int], complex]] = None
    E: complex = 0j

    def w(self, k: int) -> complex:
        return complex(self.W(k)) if self.W is not None else 0j


@dataclass
class RecursionResult:
    """Coefficients from an invariance recursion plus the constraints met on the way"""
    f: List[complex]
    constraints: List[Dict[str, Any]] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)
    form: str = "general"
    operator_conditions: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def violated(self) -> List[Dict[str, Any]]:
        return [c for c in self.constraints if not c["satisfied"]]

    def as_series(self) -> TruncatedSeries:
        return TruncatedSeries.from_list(self.f)


@dataclass
class InvariantSolution:
    """Eigenfunction coefficients, effective potential spectrum and energy"""
    f: List[complex]
    W: Dict[int, Optional[complex]]
    E: complex
    meta: Dict[str, Any] = field(default_factory=dict)

    def as_series(self) -> TruncatedSeries:
        return TruncatedSeries.from_list(self.f)

    def hamiltonian(self, potential: PotentialSpec) -> HamiltonianSpec:
        w = dict(self.W)
        return HamiltonianSpec(potential, lambda k: w.get(k) or 0j, self.E)


@dataclass(frozen=True)
class PartitionPotentialSpec:
    """V_N(x) = sum A_j x^(2jN) + sum B_j x^((4j+1)N) + sum C_j x^((4j+3)N)"""
    N: int
    A: Tuple[complex, ...] = ()
    B: Tuple[complex, ...] = ()
    C: Tuple[complex, ...] = ()

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f"partition size must be >= 1, got {self.N}")

    def terms(self) -> List[Tuple[str, int, int, complex]]:
        """(family, j, exponent, coefficient) for every listed coefficient"""
        out = []
        for j, a in enumerate(self.A):
            out.append(("A", j, 2 * j * self.N, complex(a)))
        for j, b in enumerate(self.B):
            out.append(("B", j, (4 * j + 1) * self.N, complex(b)))
        for j, c in enumerate(self.C):
            out.append(("C", j, (4 * j + 3) * self.N, complex(c)))
        return out


# =====================================================================
# Hamiltonian and commutant residual
# =====================================================================

def apply_hamiltonian(H: HamiltonianSpec, f: TruncatedSeries) -> TruncatedSeries:
    """-f'' + V f + sum_k W(k) f_k x^k; the result has order max(N - 2, 0)"""
    if f.nvars != 1:
        raise DomainError("apply_hamiltonian needs a one-variable series")
    order = max(f.order - 2, 0)
    kinetic = -differentiate(differentiate(f))
    local = H.potential.to_series(f.order) * f
    effective = f.map_coefficients(lambda k, v: v * H.w(k[0]))
    return (kinetic + local + effective).truncate(order)


def invariance_residual(Q: DiagonalOperator, H: HamiltonianSpec, f: TruncatedSeries) -> TruncatedSeries:
    """(Q H - H Q) f"""
    return Q.apply(apply_hamiltonian(H, f)) - apply_hamiltonian(H, Q.apply(f))


def commutant_matrix(V: PotentialSpec, Q: DiagonalOperator, degree: int) -> np.ndarray:
    """Matrix of f -> (QH - HQ) f on polynomials of degree <= degree, rows k = 0..degree-2"""
    H = HamiltonianSpec(V)
    M = np.zeros((max(degree - 1, 1), degree + 1), dtype=complex)
    for j in range(degree + 1):
        column = invariance_residual(Q, H, TruncatedSeries.monomial((j,), degree))
        for k in range(M.shape[0]):
            M[k, j] = column.coefficient(k)
    return M


def commutant_nullspace_distance(f: Sequence[complex], V: PotentialSpec, Q: DiagonalOperator,
                                 degree: int = 12) -> Dict[str, Any]:
    """Relative distance of the truncated coefficient vector from the commutant null space"""
    M = commutant_matrix(V, Q, degree)
    basis = null_space(M)
    v = np.zeros(degree + 1, dtype=complex)
    n = min(len(f), degree + 1)
    v[:n] = np.asarray(f[:n], dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        return {"dimension": basis.shape[1], "distance": 0.0}
    projected = basis @ (basis.conj().T @ v)
    return {
        "dimension": int(basis.shape[1]),
        "distance": float(np.linalg.norm(v - projected) / norm),
    }


# =====================================================================
# Invariance recursions
# =====================================================================

def _constraint_value(k: int, f: Sequence[complex], V: PotentialSpec, Q: DiagonalOperator) -> complex:
    qk = Q.spectrum(k)
    return sum(V.coefficient(k - j) * f[j] * (qk - Q.spectrum(j)) for j in range(k))


def operator_invariance_conditions(V: PotentialSpec, Q: DiagonalOperator, N: int,
                                   tol: Optional[float] = None) -> List[Dict[str, Any]]:
    """
    Violated conditions for [H, Q] = 0 on every f up to order N: the kinetic
    term needs Q(k) = Q(k+2), each potential term V_m needs Q(k) = Q(k-m).
    """
    tol = config.DEFAULT_TOLERANCE if tol is None else tol
    out = []
    for k in range(max(N - 1, 0)):
        gap = Q.spectrum(k) - Q.spectrum(k + 2)
        if abs(gap) >= tol:
            out.append({"k": k, "j": k + 2, "kind": "kinetic", "value": (k + 1) * (k + 2) * gap})
        for j in range(k):
            v = V.coefficient(k - j)
            if v == 0:
                continue
            value = v * (Q.spectrum(k) - Q.spectrum(j))
            if abs(value) >= tol:
                out.append({"k": k, "j": j, "kind": "potential", "value": value})
    return out


def recursion_invariance(f0: complex, f1: complex, V: PotentialSpec, Q: DiagonalOperator,
                         N: int, form: str = "auto", tol: Optional[float] = None,
                         free_values: Optional[Mapping[int, complex]] = None) -> RecursionResult:
    """
    f_{k+2} (k+1)(k+2) (Q(k) - Q(k+2)) = sum_{j<k} V_{k-j} f_j (Q(k) - Q(j)).

    For dilation operators form="auto" uses the reduced dilation form. A vanishing
    denominator turns step k into a constraint; f_{k+2} is then free (free_values or 0).
    """
    tol = config.DEFAULT_TOLERANCE if tol is None else tol
    free_values = dict(free_values or {})
    use_dilation = form == "dilation" or (form == "auto" and Q.family == "dilation" and Q.deformation is not None)
    if use_dilation and Q.deformation is None:
        raise DomainError("dilation form needs an operator that carries its deformation")
    f: List[complex] = [complex(f0), complex(f1)] + [0j] * max(N - 1, 0)
    f = f[: N + 1]
    result = RecursionResult(f=f, form="dilation" if use_dilation else "general")

    if V.is_zero():
        result.flags.append("inversion-only symmetry")
        admissible = all(abs(Q.spectrum(k) - Q.spectrum(k + 2)) < tol for k in range(max(N - 1, 0)))
        if not admissible:
            result.flags.append("Q(k) != Q(k+2): only the linear solution survives")

    for k in range(0, N - 1):
        if use_dilation:
            d = Q.deformation
            denom = (1 - d.power(2)) * (k + 1) * (k + 2)
            numer = sum(V.coefficient(k - j) * f[j] * (1 - d.power(j - k)) for j in range(k))
        else:
            denom = (k + 1) * (k + 2) * (Q.spectrum(k) - Q.spectrum(k + 2))
            numer = _constraint_value(k, f, V, Q)
        if abs(denom) < config.ROOT_OF_UNITY_TOL * (k + 1) * (k + 2):
            value = _constraint_value(k, f, V, Q)
            satisfied = abs(value) < tol
            result.constraints.append({"k": k, "value": value, "satisfied": satisfied})
            if not satisfied:
                logger.debug("invariance constraint violated at k=%d: %s", k, value)
            f[k + 2] = complex(free_values.get(k + 2, 0j))
            continue
        f[k + 2] = numer / denom
    result.operator_conditions = operator_invariance_conditions(V, Q, N, tol)
    if any(c["kind"] == "potential" for c in result.operator_conditions):
        result.flags.append("potential does not commute with Q")
    if result.violated:
        logger.info("%d invariance constraints violated", len(result.violated))
    return result


# =====================================================================
# Gauge-like potential transformation
# =====================================================================

def singular_modes(V0: PotentialSpec, d: Deformation, include_recursion: bool = False) -> List[int]:
    """Exponents k >= 1 with V0_k != 0 where 1 - q^-k vanishes (or 1 - q^2, for the solver)"""
    modes = []
    recursion_singular = include_recursion and abs(1 - d.power(2)) < config.ROOT_OF_UNITY_TOL
    for k in V0.support():
        if k == 0:
            continue
        if abs(1 - d.power(-k)) < config.ROOT_OF_UNITY_TOL or recursion_singular:
            modes.append(k)
    return modes


def _is_identity(d: Deformation) -> bool:
    return abs(d.q - 1) < config.ROOT_OF_UNITY_TOL


def gauge_transform_potential(V0: PotentialSpec, d: Deformation) -> PotentialSpec:
    """
    V_k(q) = (1/2) k V0_k (q^2 - 1) / (1 - q^-k).

    The constant term passes through unchanged; at q = 1 the map is the identity.
    """
    if _is_identity(d):
        return V0
    modes = singular_modes(V0, d)
    if modes:
        raise SingularModeError(modes)
    q2m1 = d.power(2) - 1
    out = []
    for k, v in enumerate(V0.coeffs):
        if k == 0 or v == 0:
            out.append(complex(v))
            continue
        out.append(0.5 * k * v * q2m1 / (1 - d.power(-k)))
    return PotentialSpec(tuple(out))


def qprimitive_transform(V0: PotentialSpec, d: Deformation) -> PotentialSpec:
    """
    V(x, q^2) = (q^2 (q + 1/q) / 2) q^{x d/dx} J(dV0/dx), J the Jackson integral.

    The integration constant is fixed so that V(0, q^2) = V0(0).
    """
    if abs(d.q) >= 1:
        raise NonConvergenceError(f"q-primitive needs |q| < 1, got {abs(d.q):.6g}")
    if V0.is_zero():
        return PotentialSpec(())
    order = max(V0.degree, 1)
    q = d.q
    primitive = jackson_integral(differentiate(V0.to_series(order)), d)
    scaled = scale_argument(primitive, 0, q) * (q * q * (q + 1 / q) / 2)
    coeffs = scaled.truncate(V0.degree).to_list()
    coeffs[0] = V0.coefficient(0)
    return PotentialSpec(tuple(coeffs))


# =====================================================================
# q-independent solver
# =====================================================================

def _effective_spectrum(f: Sequence[complex], V: PotentialSpec, upto: int) -> Dict[str, Any]:
    """
    W(k) = [f_{k+2}(k+1)(k+2) - sum_l f_l V_{k-l} + E f_k] / f_k, with E fixed by
    W = 0 at the first nonzero f_k.
    """
    scale = max((abs(v) for v in f), default=0.0)
    thresh = 1e-14 * scale

    def drive(k: int) -> complex:
        return f[k + 2] * (k + 1) * (k + 2) - sum(f[l] * V.coefficient(k - l) for l in range(k + 1))

    k0 = next((k for k in range(upto + 1) if abs(f[k]) > thresh), None)
    if k0 is None:
        return {"E": 0j, "W": {k: None for k in range(upto + 1)}, "unresolved": {}, "anchor": None}
    E = -drive(k0) / f[k0]
    W: Dict[int, Optional[complex]] = {}
    unresolved: Dict[int, float] = {}
    for k in range(upto + 1):
        if abs(f[k]) > thresh:
            W[k] = (drive(k) + E * f[k]) / f[k]
            continue
        gap = abs(drive(k))
        if gap > config.DEFAULT_TOLERANCE * max(scale, 1.0):
            # W(k) would have to absorb the gap but multiplies f_k = 0
            W[k] = None
            unresolved[k] = gap
        else:
            W[k] = 0j
    return {"E": E, "W": W, "unresolved": unresolved, "anchor": k0}


def recursion_q_independent_derived(V0: PotentialSpec, f0: complex, f1: complex, N: int) -> List[complex]:
    """f_{k+2} = -sum_j ((k-j)/2) V0_{k-j} f_j / ((k+1)(k+2))"""
    f = [complex(f0), complex(f1)] + [0j] * max(N - 1, 0)
    f = f[: N + 1]
    for k in range(N - 1):
        f[k + 2] = -sum(0.5 * (k - j) * V0.coefficient(k - j) * f[j] for j in range(k)) / ((k + 1) * (k + 2))
    return f


def recursion_q_independent_printed(V0: PotentialSpec, f0: complex, f1: complex, N: int) -> List[complex]:
    """f_{k+2} = sum_j V0_{k-j} f_j / ((k+1)(k+2)), as printed"""
    f = [complex(f0), complex(f1)] + [0j] * max(N - 1, 0)
    f = f[: N + 1]
    for k in range(N - 1):
        f[k + 2] = sum(V0.coefficient(k - j) * f[j] for j in range(k)) / ((k + 1) * (k + 2))
    return f


def solve_q_independent(V0: PotentialSpec, f0: complex, f1: complex, d: Deformation,
                        N: int) -> InvariantSolution:
    """
    Substitute the gauge-transformed V(q) into the dilation recursion, then read
    W(k) and E off the Schrodinger recursion.
    """
    modes = singular_modes(V0, d, include_recursion=True)
    if modes:
        raise SingularModeError(modes)
    V = gauge_transform_potential(V0, d)
    Q = dilation_op(d)
    rec = recursion_invariance(f0, f1, V, Q, N, form="dilation")
    f = rec.f
    derived = recursion_q_independent_derived(V0, f0, f1, N)
    printed = recursion_q_independent_printed(V0, f0, f1, N)
    spectrum = _effective_spectrum(f, V, N - 2)
    residual = invariance_residual(Q, HamiltonianSpec(V), TruncatedSeries.from_list(f))
    meta = {
        "recursion": "dilation form with gauge-transformed potential",
        "q": d.q,
        "deformation": d.label(),
        "potential_q": V,
        "derived_deviation": max(abs(a - b) for a, b in zip(f, derived)),
        "printed_deviation": max(abs(a - b) for a, b in zip(f, printed)),
        "commutant_residual": max((abs(v) for v in residual.coeffs.values()), default=0.0),
        "unresolved": spectrum["unresolved"],
        "anchor": spectrum["anchor"],
        "constraints": rec.constraints,
    }
    if spectrum["unresolved"]:
        logger.warning("Schrodinger recursion unresolved at k=%s (f_k = 0)", sorted(spectrum["unresolved"]))
    return InvariantSolution(f=f, W=spectrum["W"], E=spectrum["E"], meta=meta)


def q_independence_sweep(V0: PotentialSpec, f0: complex, f1: complex,
                         deformations: Sequence[Deformation], N: int) -> Dict[str, Any]:
    """Solve at several q; report the spread of f_k and of W(k)"""
    solutions = [solve_q_independent(V0, f0, f1, d, N) for d in deformations]
    f_spread = 0.0
    w_spread = 0.0
    for sol in solutions[1:]:
        f_spread = max(f_spread, max(abs(a - b) for a, b in zip(sol.f, solutions[0].f)))
        for k, w in sol.W.items():
            w0 = solutions[0].W.get(k)
            if w is not None and w0 is not None:
                w_spread = max(w_spread, abs(w - w0))
    return {
        "solutions": solutions,
        "f_spread": f_spread,
        "W_spread": w_spread,
        "max_commutant_residual": max(s.meta["commutant_residual"] for s in solutions),
    }


# =====================================================================
# Partition potentials
# =====================================================================

def partition_potential(spec: PartitionPotentialSpec) -> PotentialSpec:
    terms: Dict[int, complex] = {}
    for _, _, exponent, coeff in spec.terms():
        if coeff != 0:
            terms[exponent] = terms.get(exponent, 0j) + coeff
    return PotentialSpec.from_terms(terms)


def partition_angle(spec: PartitionPotentialSpec, n: int) -> float:
    if not 1 <= n <= spec.N - 1:
        raise DomainError(f"partition index must satisfy 1 <= n <= N-1, got n={n}, N={spec.N}")
    return n * math.pi / spec.N


def partition_mode_factors(spec: PartitionPotentialSpec, n: int) -> List[Dict[str, Any]]:
    """The factor 1 - q^-m each listed coefficient carries at q = e^{i n pi / N}"""
    d = Deformation.unimodular(partition_angle(spec, n))
    return [
        {"family": fam, "j": j, "exponent": m, "factor": 1 - d.power(-m)}
        for fam, j, m, _ in spec.terms()
    ]


def partition_recursion(spec: PartitionPotentialSpec, n: int, f0: complex, f1: complex,
                        N_trunc: int) -> InvariantSolution:
    """
    f_{k+2} = sum_{j <= (k-3)/4} (B_j f_{k-4j-1} - C_j f_{k-4j-3}) / (e^{is} sin(s) (k+1)(k+2))
    at s = n pi / N, with the commutant residual under q^{x d/dx} reported next to it.
    """
    s = partition_angle(spec, n)
    d = Deformation.unimodular(s)
    sin_s = d.power(1).imag
    if abs(sin_s) < config.ROOT_OF_UNITY_TOL:
        raise DomainError(f"sin(s) vanishes at s = {s}")
    prefactor = d.power(1) * sin_s
    f = [complex(f0), complex(f1)] + [0j] * max(N_trunc - 1, 0)
    f = f[: N_trunc + 1]
    B = [complex(b) for b in spec.B]
    C = [complex(c) for c in spec.C]
    for k in range(N_trunc - 1):
        total = 0j
        if k >= 3:
            for j in range((k - 3) // 4 + 1):
                if j < len(B):
                    total += B[j] * f[k - 4 * j - 1]
                if j < len(C):
                    total -= C[j] * f[k - 4 * j - 3]
        f[k + 2] = total / (prefactor * (k + 1) * (k + 2))

    V = partition_potential(spec)
    Q = dilation_op(d)
    residual = invariance_residual(Q, HamiltonianSpec(V), TruncatedSeries.from_list(f))
    direct = recursion_invariance(f0, f1, V, Q, N_trunc, form="general")
    spectrum = _effective_spectrum(f, V, N_trunc - 2)
    factors = partition_mode_factors(spec, n)
    meta = {
        "recursion": "partition (printed)",
        "s": s,
        "n": n,
        "N": spec.N,
        "commutant_residual": max((abs(v) for v in residual.coeffs.values()), default=0.0),
        "direct_f": direct.f,
        "direct_constraints": direct.constraints,
        "direct_deviation": max(abs(a - b) for a, b in zip(f, direct.f)),
        "mode_factors": factors,
        "unresolved": spectrum["unresolved"],
    }
    return InvariantSolution(f=f, W=spectrum["W"], E=spectrum["E"], meta=meta)


def partition_scan(spec: PartitionPotentialSpec, f0: complex, f1: complex, N_trunc: int) -> Dict[str, Any]:
    """Run every admissible n and measure how much the result depends on n"""
    if spec.N < 2:
        raise DomainError("partition needs N >= 2 for an admissible index")
    runs = {n: partition_recursion(spec, n, f0, f1, N_trunc) for n in range(1, spec.N)}
    first = runs[1].f
    spread = max(
        (max(abs(a - b) for a, b in zip(sol.f, first)) for sol in runs.values()),
        default=0.0,
    )
    return {"runs": runs, "n_spread": spread}


# =====================================================================
# Coulomb deformation (figure data)
# =====================================================================

@dataclass
class CurvePoint:
    x: float
    s: float
    re_v: float
    im_v: float
    converged: bool


def coulomb_potential(K: int) -> PotentialSpec:
    """1/(x - 1) = -sum_k x^k, truncated at K"""
    return PotentialSpec(tuple(-1.0 + 0j for _ in range(K + 1)))


def deform_coulomb_series(d: Deformation, K: int) -> PotentialSpec:
    """Exact gauge-transformed Coulomb coefficients"""
    return gauge_transform_potential(coulomb_potential(K), d)


def curve_scale(d: Deformation) -> complex:
    """Argument rescaling of the figure curves: q^(1/2) for real q, q on the unit circle"""
    if d.is_unimodular:
        return d.q
    return d.power(0.5)


def predicted_pole(d: Deformation) -> complex:
    """Pole of the rescaled Coulomb curve, 1/lambda"""
    return 1 / curve_scale(d)


def locate_pole(coeffs: Sequence[complex], window: int = 5) -> Optional[complex]:
    """
    Pole estimate from the tail of a power series: the averaged coefficient ratio
    c_{k-1}/c_k of the last nonzero terms. None when the tail vanishes.
    """
    tail = [(k, c) for k, c in enumerate(coeffs) if abs(c) > 0]
    if len(tail) < 2:
        return None
    ratios = []
    for (k1, c1), (k2, c2) in zip(tail[-window - 1:-1], tail[-window:]):
        if k2 == k1 + 1:
            ratios.append(complex(c1) / complex(c2))
    if not ratios:
        return None
    return complex(np.mean(ratios))


def convergence_radius(coeffs: Sequence[complex]) -> float:
    """Root-test radius |c_K|^(-1/K) from the last nonzero coefficient"""
    for k in range(len(coeffs) - 1, 0, -1):
        if abs(coeffs[k]) > 0:
            return float(abs(coeffs[k]) ** (-1.0 / k))
    return math.inf


def real_pole(d: Deformation, K: Optional[int] = None, imag_tol: float = 1e-6) -> Optional[float]:
    """Detected real pole abscissa of the figure curve, None if the pole left the real axis"""
    K = config.COULOMB_TERMS if K is None else K
    lam = curve_scale(d)
    coeffs = [-(lam ** k) for k in range(K + 1)]
    pole = locate_pole(coeffs)
    if pole is None or abs(pole.imag) > imag_tol * max(1.0, abs(pole)):
        return None
    return pole.real


def deform_coulomb_curve(d: Deformation, x_grid: Sequence[float], terms: Optional[int] = None,
                         conv_tol: float = 1e-8) -> List[CurvePoint]:
    """
    Samples of the deformed 1/(x - 1).

    re_V and im_V come from the closed form 1/(lambda x - 1) with lambda = curve_scale(d)
    (q^{1/2} in real mode, q in complex mode), not from the gauge-transformed series
    coefficients; those have radius 1/|q| and are read by exact_series_pole. Only the
    converged flag looks at a series: it reports whether the K-term partial sum of
    -sum (lambda x)^k has settled at that point. NaN marks the pole itself.
    """
    K = config.COULOMB_TERMS if terms is None else terms
    lam = curve_scale(d)
    s = d.s if d.s is not None else float(np.log(abs(d.q)))
    series = TruncatedSeries(1, K, {(k,): -(lam ** k) for k in range(K + 1)})
    xs = np.asarray(x_grid, dtype=float)
    sums = partial_sums(series, xs)
    points = []
    for x, row in zip(xs, sums):
        arg = lam * x - 1
        if abs(arg) < 1e-12:
            value = complex(math.nan, math.nan)
        else:
            value = 1 / arg
        last = abs(row[-1] - row[-2]) if K >= 1 else abs(row[-1])
        finite = bool(np.isfinite(row[-1]))
        converged = finite and last <= conv_tol * max(1.0, abs(row[-1])) and abs(arg) >= 1e-12
        points.append(CurvePoint(float(x), float(s), float(value.real), float(value.imag), bool(converged)))
    return points


def exact_series_pole(d: Deformation, K: Optional[int] = None) -> Optional[complex]:
    """Pole read off the exact gauge-transformed Coulomb coefficients"""
    K = config.COULOMB_TERMS if K is None else K
    return locate_pole(deform_coulomb_series(d, K).coeffs)


# =====================================================================
# Phase-space closure
# =====================================================================

def qcommutator_closure(Q: DiagonalOperator, d: Deformation, N: int = 20) -> Dict[str, Any]:
    """
    For x-hat = x Q and d-hat = Q d on x^j:
    d-hat x-hat -> (j+1) Q(j)^2, x-hat d-hat -> j Q(j-1)^2.
    Measures c_j with d-hat x-hat - c_j x-hat d-hat = 1 and compares with q and q^2;
    also reports d-hat x-hat - q^2 x-hat d-hat against q^{2j}.
    """
    q = d.q
    q2 = d.power(2)
    c_values = []
    rhs_q2 = []
    for j in range(N + 1):
        left = (j + 1) * Q.spectrum(j) ** 2
        right = j * Q.spectrum(j - 1) ** 2 if j > 0 else 0j
        rhs_q2.append(left - q2 * right)
        if j > 0 and abs(right) > 0:
            c_values.append((left - 1) / right)
    tol = config.DEFAULT_TOLERANCE
    return {
        "c_values": c_values,
        "closes_with_q2": all(abs(c - q2) < tol for c in c_values),
        "closes_with_q": all(abs(c - q) < tol for c in c_values),
        "q2_commutator_is_identity": all(abs(r - 1) < tol for r in rhs_q2),
        "q2_commutator_is_dilation": all(abs(r - d.power(2 * j)) < tol for j, r in enumerate(rhs_q2)),
    }


def printed_realization_square(j: int, d: Deformation) -> complex:
    """q^j (q^{2j} - 1) / ((q - 1)(j + 1)), the coordinate realization as printed"""
    q = d.q
    if abs(q - 1) < config.ROOT_OF_UNITY_TOL:
        return complex(2 * j / (j + 1))
    return d.power(j) * (d.power(2 * j) - 1) / ((q - 1) * (j + 1))


def realization_recursion_residual(d: Deformation, N: int = 50) -> float:
    """max_j |(j+1) Q^2(j) - 1 - q^2 j Q^2(j-1)|"""
    q2 = d.power(2)
    worst = abs(realization_square(0, d) - 1)
    for j in range(1, N + 1):
        worst = max(worst, abs((j + 1) * realization_square(j, d) - 1 - q2 * j * realization_square(j - 1, d)))
    return worst
