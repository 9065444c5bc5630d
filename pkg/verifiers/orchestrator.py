"""
Verification Orchestrator
Coordinates all verification stages and assembles the discrepancy ledger
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, Optional

import config

from .algebra_verifier import AlgebraVerifier
from .dilation_verifier import DilationVerifier
from .figure_verifier import FigureVerifier
from .invariance_verifier import InvarianceVerifier
from .ledger import Ledger
from .ncalgebra_verifier import NCAlgebraVerifier
from .perturbative_verifier import PerturbativeVerifier
from .plane_verifier import PlaneVerifier

logger = logging.getLogger(__name__)

STAGES = ("algebra", "dilation", "invariance", "figures", "ncalgebra", "ncplane", "perturbative")


@dataclass
class PipelineState:
    """Tracks the state of the verification pipeline"""
    current_stage: str = ""
    progress: float = 0.0
    status: str = "idle"
    algebra_complete: bool = False
    dilation_complete: bool = False
    invariance_complete: bool = False
    figures_complete: bool = False
    ncalgebra_complete: bool = False
    ncplane_complete: bool = False
    perturbative_complete: bool = False


class VerificationOrchestrator:
    """
    Runs the verification stages in order and collects one ledger entry per claim.

    Pipeline:
    1. Algebra → matrices, realization recursion, q-calculus
    2. Dilation → 3D operators, limits, non-commutative calculus
    3. Invariance → recursions, gauge map, q-independent solver, partitions
    4. Figures → Coulomb pole drift and elimination
    5. NC algebra → quantum-plane relations, E(2) deformation, confluence
    6. NC plane → Bessel functions, plane operator, candidate solutions
    7. Perturbative → vector potential, curl, phases, effective field
    """

    def __init__(self, tolerance: Optional[float] = None, order: Optional[int] = None,
                 fuzz_trials: Optional[int] = None):
        tolerance = config.DEFAULT_TOLERANCE if tolerance is None else tolerance
        order = config.DEFAULT_ORDER if order is None else order
        self.verifiers = {
            "algebra": AlgebraVerifier(min(tolerance, 1e-12)),
            "dilation": DilationVerifier(min(tolerance, 1e-12)),
            "invariance": InvarianceVerifier(tolerance, order),
            "figures": FigureVerifier(),
            "ncalgebra": NCAlgebraVerifier(trials=fuzz_trials),
            "ncplane": PlaneVerifier(),
            "perturbative": PerturbativeVerifier(),
        }
        self.state = PipelineState()
        self.results: Dict[str, Any] = {}
        self.ledger = Ledger()

    def run_pipeline(
        self,
        progress_callback: Optional[Callable] = None,
        stages: Optional[Iterable[str]] = None,
    ) -> Dict[str, Any]:
        """
        Execute the selected verification stages (all by default).

        Args:
            progress_callback: Optional callback for progress updates
                               Signature: callback(stage_name, progress_pct, status_message)
            stages: Optional subset of STAGES, run in pipeline order
        """
        selected = list(STAGES) if stages is None else [s for s in STAGES if s in set(stages)]
        unknown = set(stages or ()) - set(STAGES)
        if unknown:
            raise ValueError(f"unknown verification stages: {sorted(unknown)}")

        def update_progress(stage: str, progress: float, status: str):
            self.state.current_stage = stage
            self.state.progress = progress
            self.state.status = status
            logger.info("[%s] %s", stage, status)
            if progress_callback:
                progress_callback(stage, progress, status)

        try:
            for index, stage in enumerate(selected):
                verifier = self.verifiers[stage]
                update_progress(stage, index / len(selected), f"Verifying {stage} claims...")

                stage_results = verifier.run()
                self.ledger.extend(stage_results["entries"])
                self.results[stage] = {k: v for k, v in stage_results.items() if k != "entries"}
                self.results[f"{stage}_summary"] = verifier.get_summary()
                setattr(self.state, f"{stage}_complete", True)

                update_progress(stage, (index + 1) / len(selected), f"{stage_results['total_claims']} claims checked")

            counts = self.ledger.counts()
            update_progress(self.state.current_stage, 1.0, f"Verification complete: {counts}")

            return {
                'success': True,
                'results': self.results,
                'state': self.state,
                'ledger': self.ledger,
            }

        except Exception as e:
            logger.exception("verification stage %s failed", self.state.current_stage)
            update_progress(self.state.current_stage, self.state.progress, f"Error: {str(e)}")
            return {
                'success': False,
                'error': str(e),
                'results': self.results,
                'state': self.state,
                'ledger': self.ledger,
            }

    def get_ledger(self) -> Ledger:
        return self.ledger

    def get_summaries(self) -> str:
        """All stage summaries, in pipeline order"""
        return "\n\n".join(self.results[f"{s}_summary"] for s in STAGES if f"{s}_summary" in self.results)
