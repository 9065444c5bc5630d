"""
Stage 1: Algebra Verifier
Matrix q-commutators, the coordinate realization recursion and its closures,
the integral action and the q-calculus inverse pair
"""
import logging
from typing import Any, Dict, List

from qalgebra.dilation import dilation_op, integral_action, realization_square, sqrt_realization
from qalgebra.ncalgebra import scan_conventions
from qalgebra.qcore import Deformation, jackson_derivative_relation, jackson_integral, jackson_partial_sum, q_derivative, q_exponential
from qalgebra.series import TruncatedSeries, evaluate
from qalgebra.symmetry1d import printed_realization_square, qcommutator_closure, realization_recursion_residual

from .ledger import LedgerRecorder, verdict_from_residual

logger = logging.getLogger(__name__)

Q_SAMPLES = (Deformation.general(0.5), Deformation.unimodular(0.7), Deformation.unimodular(2.5))
GENERIC = Deformation.unimodular(0.7)


class AlgebraVerifier:
    """Checks the one-dimensional algebraic claims"""

    def __init__(self, tolerance: float = 1e-12):
        self.tolerance = tolerance
        self.recorder = LedgerRecorder("algebra")
        self.conventions: List[Dict[str, Any]] = []

    # ----- matrices -----

    def _lie_convention(self) -> Dict[str, Any]:
        if not self.conventions:
            self.conventions = scan_conventions()
        good = [c for c in self.conventions if c["lie_all"]]
        if not good:
            raise ValueError("no sign convention satisfies the Lie relations")
        return good[0]

    def check_matrices(self):
        def lie():
            self._lie_convention()
            good = [c["convention"] for c in self.conventions if c["lie_all"]]
            return {
                "measured": f"{len(good)} of {len(self.conventions)} conventions: {', '.join(good)}",
                "verdict": "confirmed",
            }

        self.recorder.check("Eq.1", "[v,r_y]=2P, [P,v]=2r_y, [P,r_y]=2v", lie)

        names = {
            "Eq.2-RyP": "[R_y,P]_q = (1+q)R_y",
            "Eq.2-VP": "[V,P]_q = -(1+q)V",
            "Eq.2-RyV": "[R_y,V]_q = 2((1-q)1-(1+q)P)",
        }
        for claim_id, relation in names.items():
            def qrel(relation=relation):
                conv = self._lie_convention()
                rel = conv["q_relations"][relation]
                return {
                    "measured": f"{rel['lhs']} (signs {rel['signs']}, convention {conv['convention']})",
                    "verdict": rel["verdict"],
                }

            self.recorder.check(claim_id, relation, qrel)

    # ----- realization -----

    def check_realization(self):
        def recursion():
            worst = max(realization_recursion_residual(d, 50) for d in Q_SAMPLES)
            return {
                "measured": f"max residual over j <= 50 at {len(Q_SAMPLES)} deformations",
                "residual": worst,
                "verdict": verdict_from_residual(worst, self.tolerance),
            }

        self.recorder.check("Eq.8-9", "(j+1)Q^2(j) = 1 + q^2 j Q^2(j-1) with Q^2(j) = q^j [j+1]/(j+1)", recursion)

        def printed():
            gap = max(abs(printed_realization_square(j, GENERIC) - realization_square(j, GENERIC)) for j in range(11))
            return {
                "measured": f"printed Q^2(0) = {printed_realization_square(0, GENERIC)}, Q^2(0) = 1",
                "residual": gap,
                "verdict": verdict_from_residual(gap, self.tolerance),
            }

        self.recorder.check("Eq.10", "x-hat = x sqrt(q^d (q^{2d}-1)/((q-1)(d+1)))", printed)

        closure = qcommutator_closure(sqrt_realization(GENERIC), GENERIC)

        def closes_q2():
            return {
                "measured": f"c_j = q^2 for all j: {closure['closes_with_q2']}",
                "verdict": "confirmed" if closure["closes_with_q2"] else "mismatch",
            }

        def closes_q():
            return {
                "measured": f"c_1 = {closure['c_values'][0]:.12g}, q = {GENERIC.q:.12g}",
                "verdict": "confirmed" if closure["closes_with_q"] else "mismatch",
                "notes": "the closing q-commutator carries q^2",
            }

        self.recorder.check("Eq.5", "[d-hat, x-hat] = 1 + (q^2-1) x-hat d-hat", closes_q2)
        self.recorder.check("Eq.6", "[d-hat, x-hat]_q = 1", closes_q)

        def dilation_commutator():
            Q = dilation_op(GENERIC)
            gap = 0.0
            for j in range(21):
                left = (j + 1) * Q.spectrum(j) ** 2
                right = j * Q.spectrum(j - 1) ** 2 if j else 0j
                gap = max(gap, abs(left - right - GENERIC.power(2 * j)))
            dil = qcommutator_closure(Q, GENERIC)
            return {
                "measured": "d-hat x-hat - x-hat d-hat differs from q^{2 x d/dx}",
                "residual": gap,
                "verdict": verdict_from_residual(gap, self.tolerance),
                "notes": f"d-hat x-hat - q^2 x-hat d-hat = q^(2x d/dx) holds: {dil['q2_commutator_is_dilation']}",
            }

        self.recorder.check("Eq.11", "[d-hat, x-hat] = q^{2 x-hat d-hat} with Q = q^{x d/dx}", dilation_commutator)

    # ----- integral action -----

    def check_integral_action(self):
        def action():
            sq_gap = 0.0
            q_gap = 0.0
            Q = sqrt_realization(GENERIC)
            for j in range(11):
                out = integral_action(TruncatedSeries.monomial((j,), 12), GENERIC).coefficient(j)
                sq_gap = max(sq_gap, abs(out - realization_square(j, GENERIC)))
                q_gap = max(q_gap, abs(out - Q.spectrum(j)))
            return {
                "measured": f"spectrum equals Q^2 to {sq_gap:.3e}",
                "residual": q_gap,
                "verdict": verdict_from_residual(q_gap, self.tolerance),
                "notes": "the q-derivative is evaluated at q x, not q^-1 x",
            }

        self.recorder.check("Eq.29", "(F(q^2x)-F(x))/(q(q-1/q)x) = Q f", action)

    # ----- q-calculus -----

    def check_qcalculus(self):
        def inverse():
            worst = 0.0
            for r in (0.5, 0.7, 0.9):
                d = Deformation.general(r)
                f = TruncatedSeries.from_list([1.0, -2.0, 0.5, 3.0, 1.5], 12)
                worst = max(worst, jackson_derivative_relation(f, d))
            return {
                "measured": "D_q of the Jackson integral returns the integrand",
                "residual": worst,
                "verdict": verdict_from_residual(worst, 1e-10),
            }

        self.recorder.check("Eq.21-inverse", "D_q (int f d_q x) = f", inverse)

        def partial_sum():
            worst = 0.0
            for r in (0.5, 0.7, 0.9):
                d = Deformation.general(r)
                f = TruncatedSeries.from_list([1.0, 0.25, -0.5, 0.125])
                closed = evaluate(jackson_integral(f, d), 0.7)
                value, _ = jackson_partial_sum(f, d, 0.7)
                worst = max(worst, abs(value - closed))
            return {
                "measured": "tail-bounded sum against the closed form at x = 0.7",
                "residual": worst,
                "verdict": verdict_from_residual(worst, 1e-10),
            }

        self.recorder.check("Eq.21-sum", "(1/q - q) x sum q^{2n+1} f(q^{2n+1} x)", partial_sum)

        def qexp():
            d = Deformation.unimodular(0.3)
            k = 0.8 - 0.4j
            e = q_exponential(k, d, 12)
            gap = q_derivative(e, d).max_abs_diff((e * k).truncate(11))
            return {
                "measured": "D_q e_q(kx) against k e_q(kx) through order 11",
                "residual": gap,
                "verdict": verdict_from_residual(gap, self.tolerance),
            }

        self.recorder.check("q-exponential", "D_q e_q(kx) = k e_q(kx)", qexp)

    def run(self) -> Dict[str, Any]:
        self.check_matrices()
        self.check_realization()
        self.check_integral_action()
        self.check_qcalculus()
        return {
            "entries": self.recorder.entries,
            "conventions": self.conventions,
            "total_claims": len(self.recorder.entries),
        }

    def get_summary(self) -> str:
        return self.recorder.summary()
