"""
Stage 2: Dilation Verifier
Limits of the one- and three-dimensional Q-operators, the non-commutative coordinate
and derivative relations, and the first-order expansions about s = 0 and s = pi
"""
import logging
import math
from typing import Any, Dict, List, Tuple

from qalgebra.dilation import dilation_op, first_order_residual, limit_spectrum, q3_realization, sqrt_realization
from qalgebra.qcore import Deformation

from .ledger import LedgerRecorder, verdict_from_residual

logger = logging.getLogger(__name__)

GENERIC = Deformation.unimodular(0.7)
MAX_DEGREE = 6


def _monomials(max_degree: int) -> List[Tuple[int, int, int]]:
    return [
        (a, b, c)
        for a in range(max_degree + 1)
        for b in range(max_degree + 1 - a)
        for c in range(max_degree + 1 - a - b)
    ]


class DilationVerifier:
    """Checks the three-dimensional Q-operators and the calculus they induce"""

    def __init__(self, tolerance: float = 1e-12):
        self.tolerance = tolerance
        self.recorder = LedgerRecorder("dilation")
        self.tables: Dict[str, Dict[str, Tuple[complex, complex, complex]]] = {}
        self._defects: Dict[str, float] = {}

    # ----- one-dimensional limits -----

    def check_limits_1d(self):
        def at_pi():
            worst = 0.0
            for op in (dilation_op(GENERIC), sqrt_realization(GENERIC)):
                lim = limit_spectrum(op, math.pi)
                worst = max(worst, max(abs(lim.spectrum(j) - (-1) ** j) for j in range(31)))
            return {
                "measured": "dilation and continuous-branch realization at s = pi, j <= 30",
                "residual": worst,
                "verdict": verdict_from_residual(worst, self.tolerance),
            }

        self.recorder.check("Eq.24-pi", "Q(j, pi) = (-1)^j (inversion)", at_pi)

        def at_zero():
            worst = 0.0
            for op in (dilation_op(GENERIC), sqrt_realization(GENERIC)):
                lim = limit_spectrum(op, 0.0)
                worst = max(worst, max(abs(lim.spectrum(j) - 1) for j in range(31)))
            return {
                "measured": "dilation and realization at s = 0, j <= 30",
                "residual": worst,
                "verdict": verdict_from_residual(worst, self.tolerance),
            }

        self.recorder.check("Eq.24-identity", "Q(j, 0) = 1", at_zero)

    # ----- three-dimensional triple -----

    def _factor_gap(self, op, expected) -> float:
        return max(abs(op.factor(e) - expected(e)) for e in _monomials(MAX_DEGREE))

    def check_limits_3d(self):
        at_pi = q3_realization(Deformation.unimodular(math.pi))
        at_half = q3_realization(Deformation.unimodular(math.pi / 2))
        self.tables = {"pi": at_pi.coordinate_action(), "pi/2": at_half.coordinate_action()}

        def limits():
            gaps = [
                self._factor_gap(at_pi.qx, lambda e: (-1) ** (e[1] + e[2])),
                self._factor_gap(at_pi.qy, lambda e: (-1) ** e[2]),
                self._factor_gap(at_pi.qz, lambda e: 1),
            ]
            worst = max(gaps)
            return {
                "measured": f"factor gaps on monomials of degree <= {MAX_DEGREE}: " + ", ".join(f"{g:.3e}" for g in gaps),
                "residual": worst,
                "verdict": verdict_from_residual(worst, self.tolerance),
            }

        self.recorder.check("Eq.25-limits", "s = pi: Qx -> Iy Iz, Qy -> Iz, Qz -> 1", limits)

        def minus_ix():
            worst = self._factor_gap(at_pi.qx, lambda e: -((-1) ** e[0]))
            return {
                "measured": "Qx at s = pi against -Ix",
                "residual": worst,
                "verdict": verdict_from_residual(worst, self.tolerance),
                "notes": "Qx tends to Iy Iz on the principal branch",
            }

        self.recorder.check("Eq.25-minus-Ix", "Qx -> -Ix at s = pi", minus_ix)

        def table():
            expected = {
                "pi": {"Qx": (1, -1, -1), "Qy": (1, 1, -1), "Qz": (1, 1, 1)},
                "pi/2": {"Qx": (0, 1j, 1j), "Qy": (1, 0, 1j), "Qz": (1, 1, 0)},
            }
            worst = 0.0
            for key, rows in expected.items():
                for name, values in rows.items():
                    got = self.tables[key][name]
                    worst = max(worst, max(abs(g - v) for g, v in zip(got, values)))
            return {
                "measured": "; ".join(f"{k}: {v}" for k, v in self.tables["pi/2"].items()),
                "residual": worst,
                "verdict": verdict_from_residual(worst, self.tolerance),
            }

        self.recorder.check("Eq.25-table", "coordinate images at s = pi and s = pi/2", table)

        def degree_one():
            worst = 0.0
            for s in (0.3, 0.7, 1.1, 2.0):
                d = Deformation.unimodular(s)
                r = q3_realization(d)
                factor = r.qz.factor((0, 0, 1))
                worst = max(worst, abs(factor ** 2 - (d.power(2) + 1) / 2))
            return {
                "measured": "Qz on z squared against (q^2+1)/2",
                "residual": worst,
                "verdict": verdict_from_residual(worst, self.tolerance),
            }

        self.recorder.check("Eq.25-degree-one", "Q(1)^2 = (q^2+1)/2", degree_one)

        def commuting():
            worst = max(q3_realization(Deformation.unimodular(s)).commutator_defect(MAX_DEGREE) for s in (0.7, math.pi / 2))
            return {
                "measured": "pairwise commutators of the triple",
                "residual": worst,
                "verdict": verdict_from_residual(worst, self.tolerance),
            }

        self.recorder.check("Eq.25-commuting", "Qx, Qy, Qz mutually commute", commuting)

    # ----- coordinates and derivatives -----

    def _relation(self, name: str) -> float:
        if not self._defects:
            self._defects = q3_realization(GENERIC).relation_defects(max_degree=4)
        return self._defects[name]

    def check_relations(self):
        relations = {
            "Eq.26": ("xx", "x_i x_j = q x_j x_i (i < j)"),
            "Eq.28-dx": ("dx", "d_i x_j = q x_j d_i (i != j)"),
            "Eq.28-dd": ("dd", "d_i d_j = q^-1 d_j d_i (i < j)"),
            "Eq.28-dxi": ("dxi", "d_i x_i = 1 + q^2 x_i d_i + (q^2-1) sum_{j>i} x_j d_j"),
            "Eq.28-line1": ("dx_swapped", "d_i x_j = q d_j x_i (i != j)"),
        }
        for claim_id, (name, expected) in relations.items():
            def relation(name=name):
                worst = self._relation(name)
                return {
                    "measured": f"largest coefficient on monomials of degree <= 4 at {GENERIC.label()}",
                    "residual": worst,
                    "verdict": verdict_from_residual(worst, 1e-10),
                }

            self.recorder.check(claim_id, expected, relation)

    def check_derivative_limits(self):
        at_pi = q3_realization(Deformation.unimodular(math.pi))
        # d-hat_i = Q_i d_i, so the limit multiplies d_i x^e by the Q_i factor of the lowered exponent
        limits = {
            "Eq.27-limit-x": (at_pi.qx, lambda e: -((-1) ** e[0]), "d-hat_x -> -Ix d_x"),
            "Eq.27-limit-y": (at_pi.qy, lambda e: (-1) ** e[2], "d-hat_y -> Iz d_y"),
            "Eq.27-limit-z": (at_pi.qz, lambda e: 1, "d-hat_z -> d_z"),
        }
        for claim_id, (op, printed, expected) in limits.items():
            def limit(op=op, printed=printed):
                worst = self._factor_gap(op, printed)
                return {
                    "measured": "factor of the limit operator on lowered monomials",
                    "residual": worst,
                    "verdict": verdict_from_residual(worst, self.tolerance),
                }

            self.recorder.check(claim_id, expected, limit)

    # ----- first order -----

    def check_first_order(self):
        def expansion():
            rows = []
            for family in (sqrt_realization, dilation_op):
                for s0 in (0.0, math.pi):
                    coarse = first_order_residual(family, s0, 1e-3)
                    fine = first_order_residual(family, s0, 5e-4)
                    rows.append((family.__name__, s0, coarse, fine))
            # second-order remainder: residual / eps^2 stays bounded under refinement
            worst = max(abs(fine - coarse) / max(coarse, 1e-300) for _, _, coarse, fine in rows)
            bounded = all(fine <= 2 * coarse + 1e-6 for _, _, coarse, fine in rows)
            return {
                "measured": "; ".join(f"{n} s0={s0:.4g}: {c:.4g} -> {f:.4g}" for n, s0, c, f in rows),
                "residual": worst,
                "verdict": "confirmed" if bounded else "mismatch",
                "notes": "remainder / eps^2 at eps = 1e-3 and 5e-4",
            }

        self.recorder.check("Eq.30-first-order", "Q(j, s) = Q(j, s0)(1 +- i eps j/2) + O(eps^2)", expansion)

    def run(self) -> Dict[str, Any]:
        self.check_limits_1d()
        self.check_limits_3d()
        self.check_relations()
        self.check_derivative_limits()
        self.check_first_order()
        return {
            "entries": self.recorder.entries,
            "tables": self.tables,
            "total_claims": len(self.recorder.entries),
        }

    def get_summary(self) -> str:
        return self.recorder.summary()
