"""
Non-commutative polynomial engine
Words over {x, y, z, dx, dy, dz}, q-commutation rewrite rules, normal ordering,
identity verification and the 2x2 matrix checks of the discrete-symmetry algebra
"""
import itertools
import logging
import threading
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

import config
from .errors import DomainError, RewriteLimitError

logger = logging.getLogger(__name__)

GENERATORS = ("x", "y", "z", "dx", "dy", "dz")
COORDINATES = (0, 1, 2)
DERIVATIVES = (3, 4, 5)

Word = Tuple[int, ...]


def is_coordinate(letter: int) -> bool:
    return letter < 3


def axis_of(letter: int) -> int:
    return letter % 3


def parse_word(text: str) -> Word:
    """'dx x y' -> (3, 0, 1)"""
    letters = []
    for token in text.split():
        if token not in GENERATORS:
            raise DomainError(f"unknown generator {token!r}")
        letters.append(GENERATORS.index(token))
    return tuple(letters)


def format_word(word: Word) -> str:
    return "*".join(GENERATORS[l] for l in word) or "1"


@dataclass(frozen=True)
class NCWord:
    coefficient: Any
    letters: Word

    @property
    def degree(self) -> int:
        return len(self.letters)


class NCPoly:
    """
    Finite sum of coefficient-weighted words. Multiplication concatenates words;
    canonical=True marks a normal-ordered result.
    """

    def __init__(self, terms: Optional[Mapping[Word, Any]] = None, canonical: bool = False):
        self.terms: Dict[Word, Any] = {}
        for word, c in (terms or {}).items():
            word = tuple(word)
            self.terms[word] = self.terms.get(word, 0) + c
        self.terms = {w: c for w, c in self.terms.items() if not _exact_zero(c)}
        self.canonical = canonical

    @classmethod
    def scalar(cls, c) -> "NCPoly":
        return cls({(): c})

    @classmethod
    def word(cls, text_or_word, coefficient=1) -> "NCPoly":
        word = parse_word(text_or_word) if isinstance(text_or_word, str) else tuple(text_or_word)
        return cls({word: coefficient})

    def words(self) -> List[NCWord]:
        return [NCWord(c, w) for w, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))]

    def __add__(self, other):
        other = other if isinstance(other, NCPoly) else NCPoly.scalar(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return NCPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            out: Dict[Word, Any] = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    out[w] = out.get(w, 0) + c1 * c2
            return NCPoly(out)
        return NCPoly({w: c * other for w, c in self.terms.items()})

    def __rmul__(self, other):
        return NCPoly({w: other * c for w, c in self.terms.items()})

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def __repr__(self):
        return f"NCPoly({format_poly(self)})"


def _exact_zero(c) -> bool:
    return c == 0


def format_poly(p: NCPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for nw in p.words():
        c = nw.coefficient
        if isinstance(c, sympy.Basic):
            c_text = str(sympy.factor(c))
        else:
            c = complex(c)
            c_text = f"{c.real:.12g}" if c.imag == 0 else f"({c.real:.12g}{c.imag:+.12g}j)"
        parts.append(f"{c_text}*{format_word(nw.letters)}")
    return " + ".join(parts)


class RewriteSystem:
    """
    q-commutation rules on dims axes (2 for the plane, 3 for space):

      x_j x_i -> q^-1 x_i x_j          (i < j)
      d_j d_i -> q d_i d_j             (i < j)
      d_i x_j -> q x_j d_i             (i != j)
      d_i x_i -> 1 + q^2 x_i d_i + (q^2 - 1) sum_{j > i} x_j d_j

    q may be a number or a sympy expression; in the latter case coefficients are exact.
    """

    def __init__(self, q, dims: int = 3, max_rewrites: Optional[int] = None, zero_tol: float = 1e-13):
        if dims not in (2, 3):
            raise DomainError(f"dims must be 2 or 3, got {dims}")
        self.symbolic = isinstance(q, sympy.Basic)
        self.q = q if self.symbolic else complex(q)
        if not self.symbolic and self.q == 0:
            raise DomainError("q must be nonzero")
        self.dims = dims
        self.max_rewrites = config.MAX_REWRITES if max_rewrites is None else max_rewrites
        self.zero_tol = zero_tol
        self.alphabet = tuple(range(dims)) + tuple(3 + i for i in range(dims))
        self._q_inv = 1 / self.q
        self._q2 = self.q ** 2
        self._cache: Dict[Tuple[str, Word], Dict[Word, Any]] = {}
        self._lock = threading.Lock()
        self._rewrites = 0
        self._call_rewrites = 0

    # ----- coefficient ring -----

    def normalize(self, c):
        return sympy.expand(c) if self.symbolic else c

    def is_zero(self, c) -> bool:
        if self.symbolic:
            return sympy.expand(c) == 0
        return abs(c) <= self.zero_tol

    # ----- rules -----

    def check_word(self, word: Word):
        for l in word:
            if l not in self.alphabet:
                raise DomainError(f"generator {GENERATORS[l]} not in a {self.dims}-axis system")

    def out_of_order(self, a: int, b: int) -> bool:
        if is_coordinate(a) == is_coordinate(b):
            return a > b
        return not is_coordinate(a) and is_coordinate(b)

    def rule(self, a: int, b: int) -> List[Tuple[Any, Word]]:
        """Right-hand side of the rule for the adjacent pair (a, b)"""
        if is_coordinate(a) and is_coordinate(b):
            return [(self._q_inv, (b, a))]
        if not is_coordinate(a) and not is_coordinate(b):
            return [(self.q, (b, a))]
        i, j = axis_of(a), axis_of(b)
        if i != j:
            return [(self.q, (b, a))]
        out: List[Tuple[Any, Word]] = [(1, ()), (self._q2, (b, a))]
        shift = self._q2 - 1
        if not self.is_zero(shift):
            for k in range(i + 1, self.dims):
                out.append((shift, (k, 3 + k)))
        return out

    def is_normal(self, word: Word) -> bool:
        return all(not self.out_of_order(a, b) for a, b in zip(word, word[1:]))

    # ----- normal form -----

    def _find_pair(self, word: Word, strategy: str) -> Optional[int]:
        positions = range(len(word) - 1)
        if strategy == "rightmost":
            positions = reversed(positions)
        for p in positions:
            if self.out_of_order(word[p], word[p + 1]):
                return p
        return None

    def normal_form_word(self, word: Word, strategy: str = "leftmost") -> Dict[Word, Any]:
        key = (strategy, word)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        p = self._find_pair(word, strategy)
        if p is None:
            result = {word: 1}
        else:
            self._rewrites += 1
            self._call_rewrites += 1
            if self._call_rewrites > self.max_rewrites:
                raise RewriteLimitError(f"more than {self.max_rewrites} rewrites in one normalization")
            result = {}
            for c, middle in self.rule(word[p], word[p + 1]):
                sub = self.normal_form_word(word[:p] + middle + word[p + 2:], strategy)
                for w, c2 in sub.items():
                    result[w] = result.get(w, 0) + c * c2
            result = {w: self.normalize(c) for w, c in result.items()}
            result = {w: c for w, c in result.items() if not self.is_zero(c)}
        with self._lock:
            self._cache[key] = result
        return result

    def start_budget(self):
        """max_rewrites applies per normal_order call"""
        self._call_rewrites = 0

    @property
    def rewrites(self) -> int:
        """Total over the lifetime of this system"""
        return self._rewrites

    @property
    def last_rewrites(self) -> int:
        return self._call_rewrites


def normal_order(p: NCPoly, R: RewriteSystem, strategy: str = "leftmost") -> NCPoly:
    """Exhaustive rule application to canonical form"""
    out: Dict[Word, Any] = {}
    R.start_budget()
    for word, c in p.terms.items():
        R.check_word(word)
        for w, c2 in R.normal_form_word(word, strategy).items():
            out[w] = out.get(w, 0) + c * c2
    cleaned = {w: R.normalize(c) for w, c in out.items()}
    return NCPoly({w: c for w, c in cleaned.items() if not R.is_zero(c)}, canonical=True)


def commutator(a: NCPoly, b: NCPoly, R: RewriteSystem) -> NCPoly:
    return normal_order(a * b - b * a, R)


def verify_identity(lhs: NCPoly, rhs: NCPoly, R: RewriteSystem) -> NCPoly:
    """Normal-ordered lhs - rhs; zero means the identity holds"""
    return normal_order(lhs - rhs, R)


def poly_distance(a: NCPoly, b: NCPoly) -> float:
    """Largest coefficient difference between two numeric polynomials"""
    keys = set(a.terms) | set(b.terms)
    return max((abs(complex(a.terms.get(k, 0)) - complex(b.terms.get(k, 0))) for k in keys), default=0.0)


def substitute(p: NCPoly, q_symbol: sympy.Symbol, value) -> NCPoly:
    """Evaluate the symbolic coefficients of p at q = value"""
    out = {}
    for w, c in p.terms.items():
        out[w] = sympy.expand(c.subs(q_symbol, value)) if isinstance(c, sympy.Basic) else c
    return NCPoly(out, p.canonical)


# =====================================================================
# Classical oracle and confluence fuzzing
# =====================================================================

def weyl_normal_form(word: Word, dims: int = 3) -> NCPoly:
    """Normal form at q = 1 by collecting x^a d^b with the Leibniz rule"""
    state: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], int] = {((0,) * dims, (0,) * dims): 1}
    for letter in word:
        i = axis_of(letter)
        new: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], int] = {}
        for (a, b), c in state.items():
            if is_coordinate(letter):
                # x^a d^b x_i = x^(a+e_i) d^b + b_i x^a d^(b-e_i)
                a2 = a[:i] + (a[i] + 1,) + a[i + 1:]
                new[(a2, b)] = new.get((a2, b), 0) + c
                if b[i]:
                    b2 = b[:i] + (b[i] - 1,) + b[i + 1:]
                    new[(a, b2)] = new.get((a, b2), 0) + c * b[i]
            else:
                b2 = b[:i] + (b[i] + 1,) + b[i + 1:]
                new[(a, b2)] = new.get((a, b2), 0) + c
        state = new
    terms = {}
    for (a, b), c in state.items():
        w = tuple(itertools.chain.from_iterable([k] * a[k] for k in range(dims)))
        w += tuple(itertools.chain.from_iterable([3 + k] * b[k] for k in range(dims)))
        terms[w] = c
    return NCPoly(terms, canonical=True)


def random_words(R: RewriteSystem, trials: int, max_degree: int, seed: Optional[int] = None) -> List[Word]:
    rng = np.random.default_rng(config.FUZZ_SEED if seed is None else seed)
    words = []
    for _ in range(trials):
        n = int(rng.integers(1, max_degree + 1))
        words.append(tuple(int(R.alphabet[i]) for i in rng.integers(0, len(R.alphabet), size=n)))
    return words


def confluence_fuzz(R: RewriteSystem, trials: int = 1000, max_degree: int = 6,
                    seed: Optional[int] = None, tol: float = 1e-9) -> Dict[str, Any]:
    """
    Normal-order random words with the leftmost and rightmost strategies and
    compare; at q = 1 also compare against the Weyl collection.
    """
    words = random_words(R, trials, max_degree, seed)
    divergences = []
    weyl_mismatches = []
    classical = (not R.symbolic) and abs(R.q - 1) < config.ROOT_OF_UNITY_TOL
    worst = 0.0
    for word in words:
        left = normal_order(NCPoly({word: 1}), R, "leftmost")
        right = normal_order(NCPoly({word: 1}), R, "rightmost")
        if R.symbolic:
            gap = normal_order(left - right, R)
            if gap.terms:
                divergences.append(format_word(word))
        else:
            dist = poly_distance(left, right)
            worst = max(worst, dist)
            if dist > tol:
                divergences.append(format_word(word))
        if classical:
            oracle = weyl_normal_form(word, R.dims)
            if poly_distance(left, oracle) > tol:
                weyl_mismatches.append(format_word(word))
    if divergences:
        logger.warning("confluence fuzz found %d divergent words", len(divergences))
    return {
        "trials": len(words),
        "max_degree": max_degree,
        "divergences": divergences,
        "max_deviation": worst,
        "weyl_checked": classical,
        "weyl_mismatches": weyl_mismatches,
        "rewrites": R.rewrites,
    }


# =====================================================================
# Plane operators
# =====================================================================

def plane_operators(R: RewriteSystem) -> Dict[str, NCPoly]:
    """p_x = -i q^2 dx, p_y = -i q dy, L_z = -i q (q y dx - x dy) and the classical E(2) generators"""
    q = R.q
    I = sympy.I if R.symbolic else 1j
    dx, dy = NCPoly.word("dx"), NCPoly.word("dy")
    x, y = NCPoly.word("x"), NCPoly.word("y")
    return {
        "px": dx * (-I * q ** 2),
        "py": dy * (-I * q),
        "Lz": (y * dx * q - x * dy) * (-I * q),
        "Px": dx,
        "Py": dy,
        "R": y * dx - x * dy,
        "x": x,
        "y": y,
    }


# =====================================================================
# 2x2 matrix representation of the discrete symmetries
# =====================================================================

BASE_MATRICES = {
    "v": sympy.Matrix([[0, 1], [-1, 0]]),
    "r_y": sympy.Matrix([[-1, 0], [0, 1]]),
    "P": sympy.Matrix([[0, 1], [1, 0]]),
}


@dataclass(frozen=True)
class MatrixRep:
    """Signs applied to the rotation generator, the reflection and the permutation"""
    sign_v: int = 1
    sign_r: int = 1
    sign_p: int = 1

    @property
    def v(self) -> sympy.Matrix:
        return self.sign_v * BASE_MATRICES["v"]

    @property
    def r_y(self) -> sympy.Matrix:
        return self.sign_r * BASE_MATRICES["r_y"]

    @property
    def P(self) -> sympy.Matrix:
        return self.sign_p * BASE_MATRICES["P"]

    @property
    def R_y(self) -> sympy.Matrix:
        return self.r_y + self.v

    @property
    def V(self) -> sympy.Matrix:
        return self.r_y - self.v

    def label(self) -> str:
        sign = {1: "+", -1: "-"}
        return f"v{sign[self.sign_v]} r{sign[self.sign_r]} P{sign[self.sign_p]}"


def all_conventions() -> List[MatrixRep]:
    return [MatrixRep(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]


def q_commutator_matrix(A: sympy.Matrix, B: sympy.Matrix, q) -> sympy.Matrix:
    """[A, B]_q = AB - q BA"""
    return A * B - q * B * A


def _is_zero_matrix(M: sympy.Matrix) -> bool:
    return all(sympy.simplify(sympy.expand(e)) == 0 for e in M)


def _signed_match(lhs: sympy.Matrix, terms: Sequence[sympy.Matrix]) -> Optional[Tuple[int, ...]]:
    """Sign pattern making lhs equal the signed sum of terms, preferring all plus"""
    for pattern in itertools.product((1, -1), repeat=len(terms)):
        total = sympy.zeros(*lhs.shape)
        for sgn, term in zip(pattern, terms):
            total += sgn * term
        if _is_zero_matrix(lhs - total):
            return pattern
    return None


def matrix_algebra_check(convention: MatrixRep, q=None) -> Dict[str, Any]:
    """
    Commutator relations [v, r_y] = 2P, [P, v] = 2 r_y, [P, r_y] = 2v exactly,
    then the three q-commutators of R_y = r_y + v, V = r_y - v symbolically in q.
    """
    q = sympy.Symbol("q") if q is None else q
    one = sympy.eye(2)
    m = convention
    squares = {
        "r_y^2 = 1": _is_zero_matrix(m.r_y * m.r_y - one),
        "P^2 = 1": _is_zero_matrix(m.P * m.P - one),
        "v^2 = -1": _is_zero_matrix(m.v * m.v + one),
    }
    lie = {
        "[v,r_y] = 2P": _is_zero_matrix(m.v * m.r_y - m.r_y * m.v - 2 * m.P),
        "[P,v] = 2r_y": _is_zero_matrix(m.P * m.v - m.v * m.P - 2 * m.r_y),
        "[P,r_y] = 2v": _is_zero_matrix(m.P * m.r_y - m.r_y * m.P - 2 * m.v),
    }
    printed = {
        "[R_y,P]_q = (1+q)R_y": (q_commutator_matrix(m.R_y, m.P, q), [(1 + q) * m.R_y]),
        "[V,P]_q = -(1+q)V": (q_commutator_matrix(m.V, m.P, q), [-(1 + q) * m.V]),
        "[R_y,V]_q = 2((1-q)1-(1+q)P)": (
            q_commutator_matrix(m.R_y, m.V, q),
            [2 * (1 - q) * one, -2 * (1 + q) * m.P],
        ),
    }
    qrel = {}
    for name, (lhs, terms) in printed.items():
        pattern = _signed_match(lhs, terms)
        if pattern is None:
            verdict = "mismatch"
        elif all(p == 1 for p in pattern):
            verdict = "confirmed"
        else:
            verdict = "sign-flip"
        qrel[name] = {
            "verdict": verdict,
            "signs": pattern,
            "lhs": str(sympy.simplify(lhs)),
        }
    return {
        "convention": m.label(),
        "squares": squares,
        "lie": lie,
        "lie_all": all(lie.values()),
        "q_relations": qrel,
    }


def scan_conventions() -> List[Dict[str, Any]]:
    return [matrix_algebra_check(c) for c in all_conventions()]
