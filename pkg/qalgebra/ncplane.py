"""
Non-commutative plane free particle
The general-q PDE, its q -> -1 limit, separation of variables, modified Bessel
functions of order 1/4 and residual verification of the separable candidates
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import sympy
from scipy import integrate, special

import config
from .errors import DomainError
from .ncalgebra import NCPoly, RewriteSystem, is_coordinate, axis_of, normal_order, plane_operators
from .qcore import Deformation

logger = logging.getLogger(__name__)

NU = 0.25
SERIES_LIMIT = 15.0
K_REFLECTION_LIMIT = 5.0

STENCIL = {
    (1, 0): "dx",
    (1, 1): "dx dy",
    (2, 0): "dx^2",
    (0, 2): "dy^2",
}


# =====================================================================
# Modified Bessel functions
# =====================================================================

def _bessel_i_series(nu: float, u: float) -> float:
    half = u / 2
    term = half ** nu / special.gamma(nu + 1)
    total = term
    sq = half * half
    for k in range(1, 500):
        term *= sq / (k * (k + nu))
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total


def _bessel_i_asymptotic(nu: float, u: float) -> float:
    mu = 4 * nu * nu
    term = 1.0
    total = 1.0
    for k in range(1, 60):
        nxt = -term * (mu - (2 * k - 1) ** 2) / (k * 8 * u)
        if abs(nxt) > abs(term):
            break
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return math.exp(u) / math.sqrt(2 * math.pi * u) * total


def bessel_i(nu: float, u: float) -> float:
    """I_nu(u): ascending series up to u = 15, asymptotic expansion beyond"""
    if u <= 0:
        raise DomainError(f"Bessel argument must be positive, got {u}")
    if u <= SERIES_LIMIT:
        return _bessel_i_series(nu, u)
    return _bessel_i_asymptotic(nu, u)


def bessel_k(nu: float, u: float) -> float:
    """K_nu(u): reflection formula for small u, integral representation otherwise"""
    if u <= 0:
        raise DomainError(f"Bessel argument must be positive, got {u}")
    nu = abs(nu)
    if u <= K_REFLECTION_LIMIT and abs(math.sin(nu * math.pi)) > 1e-8:
        return math.pi * (bessel_i(-nu, u) - bessel_i(nu, u)) / (2 * math.sin(nu * math.pi))
    value, _ = integrate.quad(
        lambda t: math.exp(-u * (math.cosh(t) - 1)) * math.cosh(nu * t),
        0, np.inf, epsabs=0, epsrel=1e-13, limit=200,
    )
    return math.exp(-u) * value


def bessel_quarter(kind: str, u: float) -> float:
    if kind == "I":
        return bessel_i(NU, u)
    if kind == "K":
        return bessel_k(NU, u)
    raise DomainError(f"Bessel kind must be I or K, got {kind!r}")


def bessel_derivatives(kind: str, nu: float, u: float) -> Tuple[float, float, float]:
    """(Z, Z', Z'') from the order recurrences"""
    fn = bessel_i if kind == "I" else bessel_k
    z = fn(nu, u)
    zm1, zp1 = fn(nu - 1, u), fn(nu + 1, u)
    zm2, zp2 = fn(nu - 2, u), fn(nu + 2, u)
    sign = 1.0 if kind == "I" else -1.0
    d1 = sign * (zm1 + zp1) / 2
    d2 = (zm2 + 2 * z + zp2) / 4
    return z, d1, d2


def bessel_ode_residual(kind: str, u: float, nu: float = NU) -> float:
    """Relative residual of u^2 w'' + u w' - (u^2 + nu^2) w"""
    z, d1, d2 = bessel_derivatives(kind, nu, u)
    terms = (u * u * d2, u * d1, (u * u + nu * nu) * z)
    return abs(terms[0] + terms[1] - terms[2]) / max(abs(t) for t in terms)


def wronskian(u: float, nu: float = NU) -> float:
    """I K' - I' K, which should equal -1/u"""
    i0, i1, _ = bessel_derivatives("I", nu, u)
    k0, k1, _ = bessel_derivatives("K", nu, u)
    return i0 * k1 - i1 * k0


# =====================================================================
# PDE operators
# =====================================================================

Term = Tuple[Tuple[int, int], Tuple[int, int]]


@dataclass
class PdeOperator:
    """
    sum of c * x^cx y^cy * d_x^a d_y^b, keyed by ((a, b), (cx, cy)).
    """
    terms: Dict[Term, complex]
    label: str = ""

    def coefficient(self, derivative: Tuple[int, int], x, y):
        total = 0j
        for (deriv, (cx, cy)), c in self.terms.items():
            if deriv == derivative:
                total = total + c * np.power(x, cx) * np.power(y, cy)
        return total

    def derivatives(self) -> List[Tuple[int, int]]:
        return sorted({deriv for deriv, _ in self.terms})

    def describe(self, derivative: Tuple[int, int]) -> str:
        parts = []
        for (deriv, (cx, cy)), c in sorted(self.terms.items()):
            if deriv != derivative or c == 0:
                continue
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in (("x", cx), ("y", cy)) if e) or "1"
            c = complex(c)
            text = f"{c.real:.10g}" if abs(c.imag) < 1e-15 else f"({c.real:.10g}{c.imag:+.10g}j)"
            parts.append(f"{text}*{mono}")
        return " + ".join(parts) or "0"


def _clean(terms: Dict[Term, complex]) -> Dict[Term, complex]:
    return {k: complex(v) for k, v in terms.items() if abs(complex(v)) > 1e-14}


def general_q_operator(d: Deformation) -> PdeOperator:
    """-q dx + q(q^3-1) y dx dy - (q^2-1) x (dx^2 + dy^2) - q^2 (q-1) dy^2, as printed"""
    q = d.q
    return PdeOperator(_clean({
        ((1, 0), (0, 0)): -q,
        ((1, 1), (0, 1)): q * (q ** 3 - 1),
        ((2, 0), (1, 0)): -(q ** 2 - 1),
        ((0, 2), (1, 0)): -(q ** 2 - 1),
        ((0, 2), (0, 0)): -q ** 2 * (q - 1),
    }), label=f"general-q operator {d.label()}")


def limit_operator() -> PdeOperator:
    """dx + 2y dx dy + 2x dy^2"""
    return PdeOperator({
        ((1, 0), (0, 0)): 1.0,
        ((1, 1), (0, 1)): 2.0,
        ((0, 2), (1, 0)): 2.0,
    }, label="q -> -1 operator")


def operator_from_ncpoly(p: NCPoly, scale: complex = 1.0, label: str = "") -> PdeOperator:
    """Read a normal-ordered plane polynomial as a differential operator"""
    terms: Dict[Term, complex] = {}
    for word, c in p.terms.items():
        coord = [0, 0]
        deriv = [0, 0]
        for letter in word:
            if is_coordinate(letter):
                coord[axis_of(letter)] += 1
            else:
                deriv[axis_of(letter)] += 1
        key = ((deriv[0], deriv[1]), (coord[0], coord[1]))
        terms[key] = terms.get(key, 0j) + complex(c) * scale
    return PdeOperator(_clean(terms), label=label)


def derived_q_operator(d: Deformation) -> PdeOperator:
    """
    Normal-ordered right-hand side of [p_y, L_z] = -iq p_x - (q^3-1) L_z p_y + q(q^2-1) x p_y^2,
    divided by q^2.
    """
    R = RewriteSystem(d.q, dims=2)
    ops = plane_operators(R)
    q = R.q
    rhs = ops["px"] * (-1j * q) - ops["Lz"] * ops["py"] * (q ** 3 - 1) + ops["x"] * ops["py"] * ops["py"] * (q * (q ** 2 - 1))
    return operator_from_ncpoly(normal_order(rhs, R), scale=1 / q ** 2,
                                label=f"line-3 right-hand side {d.label()}")


def compare_operators(a: PdeOperator, b: PdeOperator, tol: float = 1e-12) -> List[Dict[str, Any]]:
    """Stencil-by-stencil coefficient comparison"""
    rows = []
    for deriv in sorted(set(a.derivatives()) | set(b.derivatives()) | set(STENCIL)):
        ta = {k: v for k, v in a.terms.items() if k[0] == deriv}
        tb = {k: v for k, v in b.terms.items() if k[0] == deriv}
        keys = set(ta) | set(tb)
        match = all(abs(ta.get(k, 0j) - tb.get(k, 0j)) < tol for k in keys)
        rows.append({
            "stencil": STENCIL.get(deriv, f"d^{deriv}"),
            a.label or "a": a.describe(deriv),
            b.label or "b": b.describe(deriv),
            "match": match,
        })
    return rows


# =====================================================================
# Candidates
# =====================================================================

@dataclass(frozen=True)
class SolutionCandidate:
    """
    Psi = amplitude * e^{sigma_x alpha x^2} e^{sigma_y alpha y^2 / 2} sqrt(y) Z_{1/4}(alpha y^2 / 2)
    with Z = I or K. The printed solution is (sigma_x, sigma_y, kind) = (-1, -1, I).
    """
    alpha: float = 1.0
    sigma_x: int = -1
    sigma_y: int = -1
    kind: str = "I"
    amplitude: float = 1.0

    def label(self) -> str:
        sign = {1: "+", -1: "-"}
        return f"(sx{sign[self.sigma_x]}, sy{sign[self.sigma_y]}, {self.kind})"

    @property
    def is_printed(self) -> bool:
        return (self.sigma_x, self.sigma_y, self.kind) == (-1, -1, "I")

    def x_factor(self, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """g, g', g''"""
        x = np.asarray(x, dtype=float)
        a = self.alpha * self.sigma_x
        g = np.exp(a * x * x)
        return g, 2 * a * x * g, (2 * a + 4 * a * a * x * x) * g

    def y_factor(self, y) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """f, f', f''"""
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0):
            raise DomainError("candidate has a pole at y = 0; grid must have y > 0")
        if self.alpha == 0:
            one = np.ones_like(y)
            return one, np.zeros_like(y), np.zeros_like(y)
        alpha = self.alpha
        h0 = np.empty_like(y)
        h1 = np.empty_like(y)
        h2 = np.empty_like(y)
        for idx, yy in np.ndenumerate(y):
            u = alpha * yy * yy / 2
            z, z1, z2 = bessel_derivatives(self.kind, NU, u)
            h0[idx] = math.sqrt(yy) * z
            h1[idx] = 0.5 * yy ** -0.5 * z + alpha * yy ** 1.5 * z1
            h2[idx] = -0.25 * yy ** -1.5 * z + 2 * alpha * yy ** 0.5 * z1 + alpha * alpha * yy ** 2.5 * z2
        b = self.sigma_y * alpha
        e0 = np.exp(b * y * y / 2)
        e1 = b * y * e0
        e2 = (b + b * b * y * y) * e0
        return e0 * h0, e1 * h0 + e0 * h1, e2 * h0 + 2 * e1 * h1 + e0 * h2

    def value(self, x, y) -> np.ndarray:
        g = self.x_factor(x)[0]
        f = self.y_factor(y)[0]
        return self.amplitude * np.multiply.outer(g, f)


def variants(alpha: float = 1.0) -> List[SolutionCandidate]:
    return [SolutionCandidate(alpha, -1, sy, kind) for sy in (-1, 1) for kind in ("I", "K")]


# =====================================================================
# Residuals
# =====================================================================

@dataclass
class Grid:
    x_min: float = -1.0
    x_max: float = 1.0
    y_min: float = 0.5
    y_max: float = 3.0
    nx: int = 41
    ny: int = 41

    @classmethod
    def default(cls) -> "Grid":
        return cls(**config.NCPLANE_GRID)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)


@dataclass
class ResidualField:
    x: np.ndarray
    y: np.ndarray
    residual: np.ndarray
    relative: float
    max_abs: float
    scale: float
    meta: Dict[str, Any] = field(default_factory=dict)

    def rows(self) -> List[Tuple[float, float, float]]:
        """(x, y, |residual|) in x-major order"""
        return [
            (float(xv), float(yv), float(abs(self.residual[i, j])))
            for i, xv in enumerate(self.x) for j, yv in enumerate(self.y)
        ]


def _check_grid(grid: Grid):
    if grid.y_min <= 0:
        raise DomainError("grid must avoid y <= 0")


def _assemble(op: PdeOperator, X, Y, derivative_fields: Dict[Tuple[int, int], np.ndarray],
              amplitude: float, x, y, meta) -> ResidualField:
    total = np.zeros(X.shape, dtype=complex)
    scale = 0.0
    for deriv in op.derivatives():
        if deriv not in derivative_fields:
            raise DomainError(f"no derivative field for {deriv}")
        term = op.coefficient(deriv, X, Y) * derivative_fields[deriv]
        total = total + term
        scale = max(scale, float(np.max(np.abs(term))))
    total = amplitude * total
    scale = abs(amplitude) * scale
    max_abs = float(np.max(np.abs(total)))
    relative = max_abs / scale if scale > 0 else 0.0
    return ResidualField(x, y, total, relative, max_abs, scale, meta)


def pde_residual(op: PdeOperator, cand: SolutionCandidate, grid: Optional[Grid] = None) -> ResidualField:
    """Residual with analytic derivatives; relative to the largest single term"""
    grid = grid or Grid.default()
    _check_grid(grid)
    x, y = grid.x, grid.y
    g = cand.x_factor(x)
    f = cand.y_factor(y)
    X, Y = np.meshgrid(x, y, indexing="ij")
    fields = {(a, b): np.multiply.outer(g[a], f[b]) for a in range(3) for b in range(3)}
    return _assemble(op, X, Y, fields, cand.amplitude, x, y,
                     {"candidate": cand.label(), "operator": op.label, "method": "analytic"})


def finite_difference_residual(op: PdeOperator, cand: SolutionCandidate, grid: Optional[Grid] = None,
                               h: float = 1e-3) -> ResidualField:
    """Same residual with second-order central differences of step h"""
    grid = grid or Grid.default()
    _check_grid(grid)
    if grid.y_min - h <= 0:
        raise DomainError("finite-difference stencil reaches y <= 0")
    x, y = grid.x, grid.y
    gm, g0, gp = (cand.x_factor(x + s * h)[0] for s in (-1, 0, 1))
    fm, f0, fp = (cand.y_factor(y + s * h)[0] for s in (-1, 0, 1))
    dx = [g0, (gp - gm) / (2 * h), (gp - 2 * g0 + gm) / h ** 2]
    dy = [f0, (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / h ** 2]
    X, Y = np.meshgrid(x, y, indexing="ij")
    fields = {(a, b): np.multiply.outer(dx[a], dy[b]) for a in range(3) for b in range(3)}
    return _assemble(op, X, Y, fields, cand.amplitude, x, y,
                     {"candidate": cand.label(), "operator": op.label, "method": f"fd h={h:g}"})


def finite_difference_gap(op: PdeOperator, cand: SolutionCandidate, grid: Optional[Grid] = None,
                          h: float = 1e-2) -> float:
    analytic = pde_residual(op, cand, grid)
    fd = finite_difference_residual(op, cand, grid, h)
    return float(np.max(np.abs(analytic.residual - fd.residual)))


def variant_scan(op: Optional[PdeOperator] = None, alpha: Optional[float] = None,
                 grid: Optional[Grid] = None) -> List[Dict[str, Any]]:
    """Rank the four (sigma_y, kind) variants by relative residual"""
    op = op or limit_operator()
    alpha = config.NCPLANE_ALPHA if alpha is None else alpha
    rows = []
    for cand in variants(alpha):
        res = pde_residual(op, cand, grid)
        rows.append({
            "candidate": cand,
            "label": cand.label(),
            "printed": cand.is_printed,
            "relative": res.relative,
            "max_abs": res.max_abs,
        })
    rows.sort(key=lambda r: r["relative"])
    return rows


# =====================================================================
# Separated equation
# =====================================================================

def separated_ode_residual(f: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]],
                           alpha: float, y_grid, sigma_x: int = -1) -> Dict[str, Any]:
    """
    f'' + sigma_x (2 alpha y f' + alpha f) on the grid, i.e. f'' - 2 alpha y f' - alpha f
    for the Gaussian x-factor e^{-alpha x^2}.
    """
    y = np.asarray(y_grid, dtype=float)
    f0, f1, f2 = f(y)
    terms = (f2, sigma_x * 2 * alpha * y * f1, sigma_x * alpha * f0)
    residual = terms[0] + terms[1] + terms[2]
    scale = max(float(np.max(np.abs(t))) for t in terms)
    return {
        "residual": residual,
        "max_abs": float(np.max(np.abs(residual))),
        "relative": float(np.max(np.abs(residual)) / scale) if scale > 0 else 0.0,
    }


def separation_reduction(sigma_x: int = -1) -> sympy.Expr:
    """
    Symbolic check that the q -> -1 operator on g(x) f(y), g = e^{sigma_x alpha x^2},
    equals 2 x g (f'' + sigma_x (2 alpha y f' + alpha f)). Returns the simplified difference.
    """
    x, y, alpha = sympy.symbols("x y alpha", real=True)
    f = sympy.Function("f")
    g = sympy.exp(sigma_x * alpha * x ** 2)
    psi = g * f(y)
    lhs = sympy.diff(psi, x) + 2 * y * sympy.diff(psi, x, y) + 2 * x * sympy.diff(psi, y, 2)
    rhs = 2 * x * g * (sympy.diff(f(y), y, 2) + sigma_x * (2 * alpha * y * sympy.diff(f(y), y) + alpha * f(y)))
    return sympy.simplify(lhs - rhs)


def substitution_identity(w: Optional[sympy.Expr] = None) -> sympy.Expr:
    """
    With f = e^{alpha y^2/2} w: f'' - 2 alpha y f' - alpha f = e^{alpha y^2/2} (w'' - alpha^2 y^2 w).
    Returns the simplified difference for the given polynomial w.
    """
    y, alpha = sympy.symbols("y alpha", real=True)
    if w is None:
        w = y ** 3 + 2 * y + 1
    else:
        w = w.subs(sympy.Symbol("y"), y)
    e = sympy.exp(alpha * y ** 2 / 2)
    f = e * w
    lhs = sympy.diff(f, y, 2) - 2 * alpha * y * sympy.diff(f, y) - alpha * f
    rhs = e * (sympy.diff(w, y, 2) - alpha ** 2 * y ** 2 * w)
    return sympy.simplify(lhs - rhs)


# =====================================================================
# Profiles
# =====================================================================

def asymptotic_profile(cand: SolutionCandidate, x0: float = 0.0,
                       y_range: Tuple[float, float] = (4.0, 8.0), samples: int = 9) -> Dict[str, Any]:
    """|Psi(x0, y)| on y_range; behavior from the endpoint ratio"""
    ys = np.linspace(y_range[0], y_range[1], samples)
    values = np.abs(cand.value(np.array([x0]), ys)[0])
    ratio = float(values[-1] / values[0]) if values[0] != 0 else math.inf
    if 0.9 <= ratio <= 1.1:
        behavior = "constant"
    elif ratio < 0.9:
        behavior = "decays"
    else:
        behavior = "grows"
    exponent = math.log(ratio) / math.log(y_range[1] / y_range[0]) if 0 < ratio < math.inf else math.nan
    return {
        "candidate": cand.label(),
        "y": ys,
        "abs_psi": values,
        "ratio": ratio,
        "behavior": behavior,
        "power_exponent": exponent,
    }


def x_profile_deviation(cand: SolutionCandidate, y0: float = 1.0, xs=None) -> float:
    """max | |Psi(x, y0)| / |Psi(0, y0)| - e^{-alpha x^2} | for the Gaussian x-factor"""
    xs = np.linspace(-2, 2, 41) if xs is None else np.asarray(xs, dtype=float)
    values = np.abs(cand.value(xs, np.array([y0]))[:, 0])
    ref = np.abs(cand.value(np.array([0.0]), np.array([y0]))[0, 0])
    expected = np.exp(cand.sigma_x * cand.alpha * xs * xs)
    return float(np.max(np.abs(values / ref - expected)))
