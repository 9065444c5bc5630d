"""
Stage 7: Perturbative Verifier
First-order deformed derivatives on plane waves, the induced vector potential,
its curl, the non-integrable phase and the effective magnetic field
"""
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

import config
from qalgebra.perturb import (
    PLANES,
    GaugeField,
    WaveVector,
    curl_vector_potential,
    field_branch_table,
    first_order_operator_residual,
    is_gradient,
    perturbed_derivative_check,
    phase_demo,
    plane_coordinate_confinement,
    q_planewave_check,
    stokes_check,
    vector_potential,
)
from qalgebra.qcore import Deformation

from .ledger import LedgerRecorder, verdict_from_residual

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-15


def _verdict_from_components(components: Sequence[str]) -> str:
    if all(c == "match" for c in components):
        return "confirmed"
    if all(c in ("match", "sign-flip") for c in components):
        return "sign-flip"
    return "mismatch"


class PerturbativeVerifier:
    """Checks the first-order physics of the non-commutative free particle"""

    def __init__(self, k: Optional[Sequence[float]] = None, epsilon: Optional[float] = None,
                 seed: int = 11):
        self.k = tuple(config.DEFAULT_WAVE_VECTOR if k is None else k)
        self.epsilon = config.DEFAULT_EPSILON if epsilon is None else epsilon
        self.rng = np.random.default_rng(seed)
        self.recorder = LedgerRecorder("perturbative")
        self.phases: Dict[str, Any] = {}
        self.branches: List[Dict[str, Any]] = []

    # ----- deformed derivatives -----

    def _sample_points(self, n: int = 3):
        # dyadic values keep the symbolic check exact
        for _ in range(n):
            k = tuple(float(v) for v in self.rng.integers(-8, 9, size=3) / 4)
            r = tuple(float(v) for v in self.rng.integers(-8, 9, size=3) / 8)
            yield k, r

    def check_derivatives(self):
        def planewave():
            worst = 0.0
            for k, r in self._sample_points():
                for axis in range(3):
                    for sign in (1, -1):
                        out = perturbed_derivative_check(axis, 1e-3, sign, k, r)
                        worst = max(worst, out["relative"])
            return {
                "measured": "first-order d-hat on exp(i k.r) against (i k + (i/hbar) A) exp(i k.r), all axes and branches",
                "residual": worst,
                "verdict": verdict_from_residual(worst, IDENTITY_TOL),
            }

        self.recorder.check("Eq.31-planewave", "d-hat exp(i k.r) = (i k + (i/hbar) A) exp(i k.r)", planewave)

        def derivation():
            rows = []
            for axis in range(3):
                coarse = first_order_operator_residual(axis, 1e-3)
                fine = first_order_operator_residual(axis, 5e-4)
                rows.append((axis, coarse, fine))
            bounded = all(fine <= 2 * coarse + 1e-6 for _, coarse, fine in rows)
            return {
                "measured": "; ".join(f"axis {a}: {c:.4g} -> {f:.4g}" for a, c, f in rows),
                "residual": max(abs(f - c) for _, c, f in rows),
                "verdict": "confirmed" if bounded else "mismatch",
                "notes": "remainder / eps^2 of the exact triple against the first-order form, s = eps",
            }

        self.recorder.check("Eq.31-derivation", "d-hat_i = d_i + i eps (x_i d_i/2 + sum_{j>i} x_j d_j) d_i + O(eps^2)", derivation)

        def shift():
            worst = 0.0
            for k, r in self._sample_points():
                for axis in range(3):
                    out = perturbed_derivative_check(axis, 1e-3, 1, k, r)
                    A = vector_potential(k, 1e-3, 1, r)[axis]
                    # the printed shift adds A instead of (i/hbar) A
                    printed_gap = abs(out["residual_value"] + (1j / config.HBAR - 1) * A)
                    worst = max(worst, printed_gap)
            return {
                "measured": f"largest gap with the shift p -> p + A: {worst:.3e}",
                "residual": worst,
                "verdict": verdict_from_residual(worst, IDENTITY_TOL),
                "notes": "the shift that matches carries i/hbar",
            }

        self.recorder.check("Eq.40-shift", "d-hat = d + A", shift)

    # ----- vector potential and curl -----

    def check_curl(self):
        def fd():
            out = curl_vector_potential(self.k, self.epsilon, 1)
            return {
                "measured": f"curl {np.round(out['curl'], 15).tolist()}",
                "residual": out["fd_error"],
                "verdict": "confirmed" if out["fd_agrees"] else "mismatch",
            }

        self.recorder.check("Eq.41-curl-fd", "finite-difference curl equals the analytic curl", fd)

        def gauge():
            mixed = not is_gradient(self.k, self.epsilon)
            single = is_gradient((1.0, 0.0, 0.0), self.epsilon)
            return {
                "measured": f"k = {self.k}: gradient {not mixed}; k = (1, 0, 0): gradient {single}",
                "verdict": "confirmed" if mixed and single else "mismatch",
            }

        self.recorder.check("Eq.41-gauge", "A is not a gradient when two components of k are nonzero", gauge)

        def printed():
            out = curl_vector_potential((1.0, 2.0, 3.0), self.epsilon, 1)
            return {
                "measured": f"analytic {out['curl'].tolist()}, printed {out['printed'].tolist()}",
                "residual": float(np.max(np.abs(out["curl"] - out["printed"]))),
                "verdict": _verdict_from_components(out["component_verdicts"]),
                "notes": f"components: {', '.join(out['component_verdicts'])}",
            }

        self.recorder.check("Eq.42-curl-printed", "curl A = -+eps hbar (-ky kz, kx kz, kx ky)", printed)

    # ----- phases -----

    def check_phases(self):
        field = GaugeField(WaveVector(self.k), self.epsilon, 1)

        def stokes():
            worst = max(stokes_check(field, (0.3, 0.2, 0.1), 0.1, plane)["rel_error"] for plane in PLANES)
            return {
                "measured": "square loops of side 0.1 in the three coordinate planes",
                "residual": worst,
                "verdict": verdict_from_residual(worst, 1e-6),
            }

        self.recorder.check("Eq.42-stokes", "loop phase equals exp(i flux)", stokes)

        def path_dependence():
            self.phases = phase_demo(self.k, self.epsilon, 1)
            pair = next(d for d in self.phases["differences"] if {d["a"], d["b"]} == {"via-x", "via-y"})
            zero = next(p for p in self.phases["paths"] if p["path"] == "zero-area")
            ok = pair["difference"] > 1e-12 and abs(complex(zero["phase_re"], zero["phase_im"]) - 1) < 1e-12
            return {
                "measured": f"|phase(via-x) - phase(via-y)| = {pair['difference']:.6e}",
                "residual": pair["difference"],
                "verdict": "confirmed" if ok else "mismatch",
            }

        self.recorder.check("Eq.42-path-dependence", "phases of endpoint-sharing paths differ", path_dependence)

        def planar():
            worst = 0.0
            normals = []
            for plane, (i, j) in PLANES.items():
                k = [0.0, 0.0, 0.0]
                k[i], k[j] = 1.5, -0.5
                out = plane_coordinate_confinement(k, plane)
                worst = max(worst, out["in_plane"])
                normals.append(out["normal"])
            ok = worst == 0.0 and all(n != 0 for n in normals)
            return {
                "measured": f"in-plane curl {worst:.3e}, normal components {normals}",
                "residual": worst,
                "verdict": "confirmed" if ok else "mismatch",
            }

        self.recorder.check("Eq.42-planar", "for motion in a plane the curl is orthogonal to it", planar)

    # ----- effective field -----

    def check_field(self):
        def field():
            self.branches = field_branch_table((1.0, 2.0, 3.0), self.epsilon)
            verdicts = [_verdict_from_components(row["components"]) for row in self.branches]
            if "confirmed" in verdicts:
                verdict = "confirmed"
            elif "sign-flip" in verdicts:
                verdict = "sign-flip"
            else:
                verdict = "mismatch"
            return {
                "measured": "; ".join(f"sign {r['sign']:+d}: {', '.join(r['components'])}" for r in self.branches),
                "verdict": verdict,
            }

        self.recorder.check("Eq.44-field", "B = -(hbar c/e) eps (ky kz, kx kz, kx ky)", field)

        def planewave(realization: str):
            d = Deformation.unimodular(0.3)
            out = q_planewave_check(1.0, d, 14, realization)
            classical = q_planewave_check(1.0, Deformation.unimodular(0.0), 14, realization)
            ok = out["residual"] < 1e-12 and out["rescaling_is_q"] and classical["residual"] < 1e-12
            return {
                "measured": f"{realization}: rescaling {out['rescaling']:.12g}, residual {out['residual']:.3e}",
                "residual": out["residual"],
                "verdict": "confirmed" if ok else "mismatch",
            }

        self.recorder.check(
            "q-planewave",
            "d-hat = Q d (coordinate realization): d-hat e_q(ikx) = ik e_q(ik q x)",
            lambda: {**planewave("sqrt"),
                     "notes": "no single rescaling fits; the squared realization gives exactly q"},
        )
        self.recorder.check(
            "q-planewave-squared",
            "d-hat = Q^2 d: d-hat e_q(ikx) = ik e_q(ik q x)",
            lambda: planewave("integral-action"),
        )

    def run(self) -> Dict[str, Any]:
        self.check_derivatives()
        self.check_curl()
        self.check_phases()
        self.check_field()
        return {
            "entries": self.recorder.entries,
            "phases": self.phases,
            "branches": self.branches,
            "total_claims": len(self.recorder.entries),
        }

    def get_summary(self) -> str:
        return self.recorder.summary()
