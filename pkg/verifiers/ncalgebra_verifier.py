"""
Stage 5: Non-commutative Algebra Verifier
Exchange relations of the quantum plane, the E(2) relations and their deformation,
and confluence of the rewriting engine
"""
import logging
from typing import Any, Dict, Optional

import sympy

import config
from qalgebra.ncalgebra import (
    NCPoly,
    RewriteSystem,
    commutator,
    confluence_fuzz,
    format_poly,
    normal_order,
    plane_operators,
    substitute,
    verify_identity,
)
from qalgebra.qcore import exact_expi

from .ledger import LedgerRecorder

logger = logging.getLogger(__name__)

Q = sympy.Symbol("q")
# numeric sample point used to size a symbolic residual
Q_PROBE = sympy.Rational(7, 10)


def residual_size(p: NCPoly) -> float:
    if not p.terms:
        return 0.0
    return max(abs(complex(sympy.N(sympy.sympify(c).subs(Q, Q_PROBE)))) for c in p.terms.values())


def _is_zero(p: NCPoly) -> bool:
    return all(sympy.simplify(c) == 0 for c in p.terms.values())


class NCAlgebraVerifier:
    """Checks the quantum-plane relations symbolically in q"""

    def __init__(self, trials: Optional[int] = None, max_degree: int = 6, seed: Optional[int] = None):
        self.trials = config.FUZZ_TRIALS if trials is None else trials
        self.max_degree = max_degree
        self.seed = config.FUZZ_SEED if seed is None else seed
        self.recorder = LedgerRecorder("ncalgebra")
        self.plane = RewriteSystem(Q, dims=2)
        self.ops = plane_operators(self.plane)
        self.residuals: Dict[str, str] = {}
        self.fuzz: Dict[str, Any] = {}
        self._system: Optional[Dict[str, Any]] = None

    def _identity(self, claim_id: str, expected: str, lhs: NCPoly, rhs: NCPoly, notes: str = ""):
        def run():
            res = verify_identity(lhs, rhs, self.plane)
            self.residuals[claim_id] = format_poly(res)
            zero = _is_zero(res)
            return {
                "measured": "0" if zero else f"residual {format_poly(res)}",
                "residual": 0.0 if zero else residual_size(res),
                "verdict": "confirmed" if zero else "mismatch",
                "notes": notes,
            }

        self.recorder.check(claim_id, expected, run)

    # ----- plane exchange relations -----

    def check_exchange(self):
        px, py, x, y = self.ops["px"], self.ops["py"], self.ops["x"], self.ops["y"]
        I = sympy.I
        self._identity("Eq.33-pxy", "p_x y = q y p_x", px * y, y * px * Q)
        self._identity("Eq.33-pyx", "p_y x = q x p_y", py * x, x * py * Q)
        self._identity("Eq.33-pypx", "p_y p_x = q p_x p_y", py * px, px * py * Q)
        self._identity(
            "Eq.33-pxx",
            "p_x x = -i q^2 + q^2 x p_x + q(q-1) y p_y",
            px * x,
            NCPoly.scalar(-I * Q ** 2) + x * px * Q ** 2 + y * py * (Q * (Q - 1)),
            notes="normal ordering gives q(q^2-1) y p_y",
        )
        self._identity("Eq.33-pyy", "p_y y = -i q + q^2 y p_y", py * y, NCPoly.scalar(-I * Q) + y * py * Q ** 2)

    # ----- E(2) and its deformation -----

    def check_euclidean(self):
        def classical():
            R1 = RewriteSystem(1.0, dims=2)
            ops = plane_operators(R1)
            Px, Py, Rot = ops["Px"], ops["Py"], ops["R"]
            residuals = [
                verify_identity(commutator(Rot, Px, R1), Py, R1),
                verify_identity(commutator(Rot, Py, R1), -Px, R1),
                commutator(Px, Py, R1),
            ]
            nonzero = [format_poly(r) for r in residuals if r.terms]
            return {
                "measured": "all three commutators exact" if not nonzero else "; ".join(nonzero),
                "verdict": "confirmed" if not nonzero else "mismatch",
            }

        self.recorder.check("Eq.34", "[R,Px] = Py, [R,Py] = -Px, [Px,Py] = 0 at q = 1", classical)

        for claim_id, (lhs, rhs, expected) in self.deformed_system().items():
            self._identity(claim_id, expected, lhs, rhs)

        def reduces():
            worst = []
            for claim_id, (lhs, rhs, _) in self.deformed_system().items():
                res = substitute(verify_identity(lhs, rhs, self.plane), Q, 1)
                if res.terms:
                    worst.append(f"{claim_id}: {format_poly(res)}")
            return {
                "measured": "residuals vanish at q = 1" if not worst else "; ".join(worst),
                "verdict": "confirmed" if not worst else "mismatch",
            }

        self.recorder.check("Eq.35-to-34", "the deformed relations reduce to E(2) at q = 1", reduces)

        def closes():
            px, py, Lz = self.ops["px"], self.ops["py"], self.ops["Lz"]
            I = sympy.I
            limits = {
                "line1": (px * py * 2),
                "line2": (py * (-I) - Lz * px * 2),
                "line3": (px * I + Lz * py * 2),
            }
            gaps = []
            for (name, (_, rhs, _)), target in zip(self.deformed_system().items(), limits.values()):
                diff = substitute(normal_order(rhs - target, self.plane), Q, -1)
                if diff.terms:
                    gaps.append(f"{name}: {format_poly(diff)}")
            actual = []
            for name, (lhs, rhs, _) in self.deformed_system().items():
                res = substitute(verify_identity(lhs, rhs, self.plane), Q, -1)
                if res.terms:
                    actual.append(f"{name}: {format_poly(res)}")
            return {
                "measured": "right-hand sides at q = -1 match" if not gaps else "; ".join(gaps),
                "verdict": "confirmed" if not gaps else "mismatch",
                "notes": "commutator residuals at q = -1: " + ("none" if not actual else "; ".join(actual)),
            }

        self.recorder.check("Eq.36", "q = -1 limit of the deformed right-hand sides", closes)

    def deformed_system(self) -> Dict[str, Any]:
        """(commutator, printed right-hand side, expected text) per line of the deformed system"""
        if self._system is not None:
            return self._system
        px, py, Lz, y, x = self.ops["px"], self.ops["py"], self.ops["Lz"], self.ops["y"], self.ops["x"]
        I = sympy.I
        self._system = {
            "Eq.35-line1": (
                commutator(px, py, self.plane),
                px * py * (1 - Q),
                "[p_x, p_y] = (1-q) p_x p_y",
            ),
            "Eq.35-line2": (
                commutator(px, Lz, self.plane),
                py * (I * Q) + Lz * px * (Q - 1) - y * py * py * (Q * (Q ** 2 - 1)),
                "[p_x, L_z] = iq p_y + (q-1) L_z p_x - q(q^2-1) y p_y^2",
            ),
            "Eq.35-line3": (
                commutator(py, Lz, self.plane),
                px * (-I * Q) - Lz * py * (Q ** 3 - 1) + x * py * py * (Q * (Q ** 2 - 1)),
                "[p_y, L_z] = -iq p_x - (q^3-1) L_z p_y + q(q^2-1) x p_y^2",
            ),
        }
        return self._system

    # ----- rewriting engine -----

    def check_confluence(self):
        def deformed():
            R = RewriteSystem(exact_expi(0.7), dims=3)
            report = confluence_fuzz(R, self.trials, self.max_degree, self.seed)
            self.fuzz["deformed"] = report
            n = len(report["divergences"])
            return {
                "measured": f"{n} divergent words out of {report['trials']} (degree <= {report['max_degree']})",
                "residual": report["max_deviation"],
                "verdict": "confirmed" if n == 0 else "mismatch",
            }

        self.recorder.check("confluence", "leftmost and rightmost rewriting agree at q = e^(0.7i)", deformed)

        def classical():
            R = RewriteSystem(1.0, dims=3)
            report = confluence_fuzz(R, min(self.trials, 500), self.max_degree, self.seed)
            self.fuzz["classical"] = report
            n = len(report["weyl_mismatches"]) + len(report["divergences"])
            return {
                "measured": f"{n} words differ from the Weyl collection out of {report['trials']}",
                "residual": report["max_deviation"],
                "verdict": "confirmed" if n == 0 else "mismatch",
            }

        self.recorder.check("confluence-classical", "normal forms at q = 1 equal the Weyl-algebra collection", classical)

    def run(self) -> Dict[str, Any]:
        self.check_exchange()
        self.check_euclidean()
        self.check_confluence()
        return {
            "entries": self.recorder.entries,
            "residuals": self.residuals,
            "fuzz": {k: {kk: vv for kk, vv in v.items() if kk != "divergences"} for k, v in self.fuzz.items()},
            "total_claims": len(self.recorder.entries),
        }

    def get_summary(self) -> str:
        return self.recorder.summary()
