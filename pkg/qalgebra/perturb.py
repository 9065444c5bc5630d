"""
Perturbative sector
First-order deformed derivatives near s = 0 and s = pi, the induced vector potential,
its curl, path-dependent phases, the effective magnetic field and q-plane waves
"""
import cmath
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

import config
from .dilation import dilation_op, integral_action_op, q3_realization, sqrt_realization
from .errors import DomainError
from .qcore import Deformation, q_exponential
from .series import differentiate, scale_argument

logger = logging.getLogger(__name__)

AXES = ("x", "y", "z")
PLANES = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}


@dataclass(frozen=True)
class WaveVector:
    k: Tuple[float, float, float]
    mass: float = config.MASS
    hbar: float = config.HBAR

    def __post_init__(self):
        k = tuple(float(v) for v in self.k)
        if len(k) != 3 or not all(math.isfinite(v) for v in k):
            raise DomainError(f"wave vector needs three finite components, got {self.k}")
        object.__setattr__(self, "k", k)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.k)

    @property
    def omega(self) -> float:
        """Free-particle dispersion hbar |k|^2 / 2m"""
        return self.hbar * float(np.dot(self.array, self.array)) / (2 * self.mass)


def _wave(k) -> WaveVector:
    return k if isinstance(k, WaveVector) else WaveVector(tuple(k))


def potential_matrix(k) -> np.ndarray:
    """M with A = -sign eps hbar M r"""
    kx, ky, kz = _wave(k).k
    return np.array([
        [kx * kx / 2, kx * ky, kx * kz],
        [0.0, ky * ky / 2, ky * kz],
        [0.0, 0.0, kz * kz / 2],
    ])


def _curl_of_linear(J: np.ndarray) -> np.ndarray:
    """curl of r -> J r"""
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


@dataclass(frozen=True)
class GaugeField:
    """
    A(r) = -sign eps hbar (kx^2 x/2 + kx ky y + kx kz z, ky^2 y/2 + ky kz z, kz^2 z/2).
    sign = +1 is the s ~ 0 branch (eps = s), sign = -1 the s ~ pi branch (eps = pi - s).
    """
    k: WaveVector
    epsilon: float
    sign: int = 1
    hbar: float = config.HBAR

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DomainError(f"branch sign must be +1 or -1, got {self.sign}")
        if self.epsilon < 0:
            raise DomainError(f"epsilon must be non-negative, got {self.epsilon}")

    @property
    def jacobian(self) -> np.ndarray:
        return -self.sign * self.epsilon * self.hbar * potential_matrix(self.k)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return r @ self.jacobian.T

    def curl(self) -> np.ndarray:
        return _curl_of_linear(self.jacobian)


def vector_potential(k, epsilon: float, sign: int, r) -> np.ndarray:
    return GaugeField(_wave(k), epsilon, sign)(r)


def finite_difference_curl(field: GaugeField, points, h: float = 1e-4) -> np.ndarray:
    """Central-difference curl at each point, shape (n, 3)"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty_like(points)
    for n, p in enumerate(points):
        J = np.empty((3, 3))
        for j in range(3):
            step = np.zeros(3)
            step[j] = h
            J[:, j] = (field(p + step) - field(p - step)) / (2 * h)
        out[n] = _curl_of_linear(J)
    return out


def printed_curl(k, epsilon: float, sign: int, hbar: float = config.HBAR) -> np.ndarray:
    """-sign eps hbar (-ky kz, kx kz, kx ky), as printed"""
    kx, ky, kz = _wave(k).k
    return -sign * epsilon * hbar * np.array([-ky * kz, kx * kz, kx * ky])


def _component_verdicts(measured: np.ndarray, reference: np.ndarray, tol: float) -> List[str]:
    verdicts = []
    for m, r in zip(measured, reference):
        if abs(m - r) <= tol:
            verdicts.append("match")
        elif abs(m + r) <= tol:
            verdicts.append("sign-flip")
        else:
            verdicts.append("mismatch")
    return verdicts


def curl_vector_potential(k, epsilon: float, sign: int, samples: int = 20,
                          seed: Optional[int] = None, tol: float = 1e-8) -> Dict[str, Any]:
    """Analytic curl with a finite-difference cross-check and the printed-formula comparison"""
    field = GaugeField(_wave(k), epsilon, sign)
    analytic = field.curl()
    rng = np.random.default_rng(config.FUZZ_SEED if seed is None else seed)
    points = rng.uniform(-2, 2, size=(samples, 3))
    fd = finite_difference_curl(field, points)
    fd_error = float(np.max(np.abs(fd - analytic)))
    printed = printed_curl(k, epsilon, sign)
    verdicts = _component_verdicts(analytic, printed, 1e-15 + 1e-12 * float(np.max(np.abs(analytic), initial=0)))
    return {
        "curl": analytic,
        "fd_error": fd_error,
        "fd_agrees": fd_error <= tol,
        "printed": printed,
        "component_verdicts": verdicts,
    }


def is_gradient(k, epsilon: float = 1.0, sign: int = 1) -> bool:
    """A linear field is a gradient iff its curl vanishes"""
    return bool(np.all(GaugeField(_wave(k), epsilon, sign).curl() == 0))


def plane_coordinate_confinement(k, plane: str) -> Dict[str, Any]:
    """For k confined to a coordinate plane the curl has no in-plane component"""
    if plane not in PLANES:
        raise DomainError(f"plane must be one of {sorted(PLANES)}, got {plane!r}")
    i, j = PLANES[plane]
    normal = 3 - i - j
    kk = list(_wave(k).k)
    kk[normal] = 0.0
    curl = GaugeField(WaveVector(tuple(kk)), 1.0, 1).curl()
    return {
        "plane": plane,
        "k": tuple(kk),
        "curl": curl,
        "in_plane": float(max(abs(curl[i]), abs(curl[j]))),
        "normal": float(curl[normal]),
    }


# =====================================================================
# Phases
# =====================================================================

def line_integral(field: GaugeField, path) -> float:
    """Sum over segments of A(midpoint) . (b - a), exact for a linear field"""
    path = np.asarray(path, dtype=float)
    if path.ndim != 2 or path.shape[0] < 2 or path.shape[1] != 3:
        raise DomainError("path needs at least two 3D vertices")
    a, b = path[:-1], path[1:]
    mids = (a + b) / 2
    return float(np.sum(field(mids) * (b - a)))


def phase_integral(field: GaugeField, path) -> complex:
    return cmath.exp(1j * line_integral(field, path))


def rectangle_path(origin, width: float, height: float, plane: str = "xy") -> np.ndarray:
    """Counter-clockwise closed rectangle in a coordinate plane"""
    i, j = PLANES[plane]
    o = np.asarray(origin, dtype=float)
    corners = [(0, 0), (width, 0), (width, height), (0, height), (0, 0)]
    out = []
    for du, dv in corners:
        p = o.copy()
        p[i] += du
        p[j] += dv
        out.append(p)
    return np.array(out)


def stokes_check(field: GaugeField, origin=(0.0, 0.0, 0.0), side: float = 0.1,
                 plane: str = "xy") -> Dict[str, Any]:
    """Loop phase of a square against exp(i (curl . n) area)"""
    i, j = PLANES[plane]
    normal = 3 - i - j
    orientation = 1.0 if (i, j) in ((0, 1), (1, 2)) else -1.0
    phase = phase_integral(field, rectangle_path(origin, side, side, plane))
    flux = orientation * field.curl()[normal] * side * side
    expected = cmath.exp(1j * flux)
    return {
        "phase": phase,
        "stokes": expected,
        "flux": flux,
        "rel_error": abs(phase - expected) / abs(expected),
    }


def default_paths() -> Dict[str, np.ndarray]:
    return {
        "loop-xy": rectangle_path((0.5, 0.5, 0.0), 0.1, 0.1, "xy"),
        "zero-area": np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.0]]),
        "via-x": np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]),
        "via-y": np.array([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]),
    }


def _planar_normal(path: np.ndarray) -> Optional[str]:
    for name, (i, j) in PLANES.items():
        normal = 3 - i - j
        if np.allclose(path[:, normal], path[0, normal]):
            return name
    return None


def _shoelace(path: np.ndarray, plane: str) -> float:
    i, j = PLANES[plane]
    u, v = path[:, i], path[:, j]
    return 0.5 * float(np.sum(u[:-1] * v[1:] - u[1:] * v[:-1]))


def phase_demo(k=None, epsilon: Optional[float] = None, sign: int = 1,
               paths: Optional[Dict[str, Sequence[Sequence[float]]]] = None) -> Dict[str, Any]:
    """Per-path phases, pairwise differences and a Stokes column for closed planar loops"""
    k = config.DEFAULT_WAVE_VECTOR if k is None else k
    epsilon = config.DEFAULT_EPSILON if epsilon is None else epsilon
    field = GaugeField(_wave(k), epsilon, sign)
    paths = default_paths() if paths is None else {n: np.asarray(p, dtype=float) for n, p in paths.items()}
    curl = field.curl()
    rows = []
    for name in sorted(paths):
        path = paths[name]
        phase = phase_integral(field, path)
        closed = bool(np.allclose(path[0], path[-1]))
        stokes_error = math.nan
        if closed:
            plane = _planar_normal(path)
            if plane is not None:
                i, j = PLANES[plane]
                orientation = 1.0 if (i, j) in ((0, 1), (1, 2)) else -1.0
                expected = cmath.exp(1j * orientation * curl[3 - i - j] * _shoelace(path, plane))
                stokes_error = abs(phase - expected)
        rows.append({
            "path": name,
            "closed": closed,
            "phase_re": phase.real,
            "phase_im": phase.imag,
            "phase_angle": cmath.phase(phase),
            "stokes_error": stokes_error,
        })
    differences = []
    for a, b in itertools.combinations(rows, 2):
        pa = complex(a["phase_re"], a["phase_im"])
        pb = complex(b["phase_re"], b["phase_im"])
        differences.append({"a": a["path"], "b": b["path"], "difference": abs(pa - pb)})
    return {"curl": curl, "paths": rows, "differences": differences}


def field_samples(k, epsilon: float, sign: int, points) -> List[Dict[str, float]]:
    field = GaugeField(_wave(k), epsilon, sign)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    values = field(points)
    return [
        {"x": p[0], "y": p[1], "z": p[2], "Ax": a[0], "Ay": a[1], "Az": a[2]}
        for p, a in zip(points.tolist(), values.tolist())
    ]


# =====================================================================
# Effective field
# =====================================================================

def effective_field(k, epsilon: float, charge_over_c: float, hbar: float = config.HBAR) -> np.ndarray:
    """B_m = -(hbar c/e) eps k_j k_l, (m, j, l) a permutation of (1, 2, 3)"""
    if charge_over_c == 0:
        raise DomainError("charge must be nonzero")
    kx, ky, kz = _wave(k).k
    return -(hbar / charge_over_c) * epsilon * np.array([ky * kz, kx * kz, kx * ky])


def field_from_curl(k, epsilon: float, sign: int, charge_over_c: float) -> np.ndarray:
    """
    Magnetic field implied by -i hbar d-hat = -i hbar d - (e/c) A_mag with d-hat = d + (i/hbar) A,
    i.e. A_mag = -(c/e) A.
    """
    if charge_over_c == 0:
        raise DomainError("charge must be nonzero")
    return -GaugeField(_wave(k), epsilon, sign).curl() / charge_over_c


def field_branch_table(k, epsilon: float, charge_over_c: float = None) -> List[Dict[str, Any]]:
    charge_over_c = config.CHARGE / config.C_LIGHT if charge_over_c is None else charge_over_c
    printed = effective_field(k, epsilon, charge_over_c)
    rows = []
    for sign in (1, -1):
        implied = field_from_curl(k, epsilon, sign, charge_over_c)
        tol = 1e-15 + 1e-12 * float(np.max(np.abs(implied), initial=0))
        rows.append({
            "sign": sign,
            "printed": printed,
            "from_curl": implied,
            "components": _component_verdicts(implied, printed, tol),
        })
    return rows


# =====================================================================
# First-order deformed derivatives
# =====================================================================

@dataclass(frozen=True)
class DerivativeTerm:
    """coefficient * x_coordinate d_first d_second, in units of (sign i eps)"""
    coefficient: sympy.Rational
    coordinate: int
    derivatives: Tuple[int, int]

    def label(self) -> str:
        a, b = self.derivatives
        return f"{self.coefficient}*{AXES[self.coordinate]}*d{AXES[a]}*d{AXES[b]}"


def first_order_derivative_operator(axis: int) -> List[DerivativeTerm]:
    """
    d-hat_i ~ d_i + sign i eps sum_j c_j x_j d_j d_i, read off the triple
    Q_i = Q(d_i) q^{sum_{j>i} d_j} with Q(d) ~ 1 + (i eps/2) d and q^d ~ 1 + i eps d.
    """
    if axis not in (0, 1, 2):
        raise DomainError(f"axis must be 0..2, got {axis}")
    terms = [DerivativeTerm(sympy.Rational(1, 2), axis, (axis, axis))]
    for j in range(axis + 1, 3):
        terms.append(DerivativeTerm(sympy.Integer(1), j, (j, axis)))
    return terms


def first_order_operator_residual(axis: int, epsilon: float, max_degree: int = 6) -> float:
    """
    max over monomials of |exact d-hat_i - first-order form| / eps^2 at s = eps,
    using d-hat_i = Q_i d_i with the principal triple.
    """
    triple = q3_realization(Deformation.unimodular(epsilon))
    op = triple.operators[axis]
    terms = first_order_derivative_operator(axis)
    worst = 0.0
    for e in itertools.product(range(max_degree + 1), repeat=3):
        if sum(e) > max_degree or e[axis] == 0:
            continue
        reduced = list(e)
        reduced[axis] -= 1
        exact = e[axis] * op.factor(reduced)
        approx = e[axis] * (1 + 1j * epsilon * sum(float(t.coefficient) * reduced[t.coordinate] for t in terms))
        worst = max(worst, abs(exact - approx))
    return worst / epsilon ** 2


def perturbed_derivative_check(axis: int, epsilon, sign: int, k, r,
                               hbar=None) -> Dict[str, Any]:
    """
    Apply the first-order d-hat on exp(i k.r) symbolically and compare with
    (i k_axis + (i/hbar) A_axis(r)) exp(i k.r). Exact rational arithmetic.
    """
    if sign not in (1, -1):
        raise DomainError(f"branch sign must be +1 or -1, got {sign}")
    hbar = config.HBAR if hbar is None else hbar
    coords = sympy.symbols("x y z", real=True)
    kk = [sympy.Rational(v) for v in _wave(k).k]
    eps = sympy.Rational(epsilon)
    hb = sympy.Rational(hbar)
    wave = sympy.exp(sympy.I * sum(ki * xi for ki, xi in zip(kk, coords)))

    lhs = sympy.diff(wave, coords[axis])
    for t in first_order_derivative_operator(axis):
        a, b = t.derivatives
        lhs += sign * sympy.I * eps * t.coefficient * coords[t.coordinate] * sympy.diff(wave, coords[a], coords[b])

    M = [[kk[0] ** 2 / 2, kk[0] * kk[1], kk[0] * kk[2]],
         [0, kk[1] ** 2 / 2, kk[1] * kk[2]],
         [0, 0, kk[2] ** 2 / 2]]
    A_axis = -sign * eps * hb * sum(M[axis][j] * coords[j] for j in range(3))
    rhs = (sympy.I * kk[axis] + sympy.I / hb * A_axis) * wave

    point = dict(zip(coords, [sympy.Rational(v) for v in r]))
    ratio_expr = sympy.expand(sympy.simplify((lhs - rhs) / wave))
    residual = ratio_expr.subs(point)
    rhs_factor = sympy.expand(sympy.simplify(rhs / wave)).subs(point)
    scale = abs(complex(rhs_factor))
    return {
        "axis": AXES[axis],
        "terms": [t.label() for t in first_order_derivative_operator(axis)],
        "symbolic_residual": ratio_expr,
        "residual_value": complex(residual),
        "residual": abs(complex(residual)),
        "relative": abs(complex(residual)) / scale if scale > 0 else abs(complex(residual)),
    }


# =====================================================================
# q-plane waves
# =====================================================================

REALIZATIONS = ("integral-action", "sqrt", "dilation")


def q_planewave_check(k: float, d: Deformation, N: int, realization: str = "sqrt") -> Dict[str, Any]:
    """
    d-hat e_q(ikx) against ik e_q(ik lam x) with lam measured from the first coefficient,
    compared through order N - 2.

    d-hat = Q d with Q the coordinate realization ("sqrt"), its square ("integral-action")
    or the dilation. Only the square gives a single rescaling, lam = q; with the coordinate
    realization lam = (2q/[2])^{1/2} fits the first coefficient and the higher ones drift.
    """
    if realization == "integral-action":
        Q = integral_action_op(d)
    elif realization == "sqrt":
        Q = sqrt_realization(d, strict=False)
    elif realization == "dilation":
        Q = dilation_op(d)
    else:
        raise DomainError(f"unknown realization {realization!r}")
    ik = 1j * k
    wave = q_exponential(ik, d, N)
    lhs = Q.apply(differentiate(wave))
    if ik == 0:
        residual = max((abs(v) for v in lhs.coeffs.values()), default=0.0)
        return {"realization": realization, "rescaling": None, "q": d.q,
                "rescaling_is_q": False, "residual": residual}
    rescaling = lhs.coefficient(1) / (ik * wave.coefficient(1))
    rhs = scale_argument(wave, 0, rescaling).truncate(N - 1) * ik
    upto = N - 2
    residual = max(
        (abs(lhs.coefficient(j) - rhs.coefficient(j)) for j in range(upto + 1)),
        default=0.0,
    )
    logger.debug("q-plane wave %s at %s: lam=%s residual=%.3e", realization, d.label(), rescaling, residual)
    return {
        "realization": realization,
        "rescaling": rescaling,
        "q": d.q,
        "rescaling_is_q": abs(rescaling - d.q) < 1e-12,
        "residual": residual,
    }
