"""
Verifiers package for qsym
"""
from .algebra_verifier import AlgebraVerifier
from .dilation_verifier import DilationVerifier
from .figure_verifier import FigureVerifier
from .invariance_verifier import InvarianceVerifier
from .ledger import KNOWN_VERDICTS, Ledger, LedgerEntry, LedgerRecorder, load_baseline
from .ncalgebra_verifier import NCAlgebraVerifier
from .orchestrator import STAGES, PipelineState, VerificationOrchestrator
from .perturbative_verifier import PerturbativeVerifier
from .plane_verifier import PlaneVerifier

__all__ = [
    'AlgebraVerifier',
    'DilationVerifier',
    'FigureVerifier',
    'InvarianceVerifier',
    'NCAlgebraVerifier',
    'PlaneVerifier',
    'PerturbativeVerifier',
    'VerificationOrchestrator',
    'PipelineState',
    'STAGES',
    'Ledger',
    'LedgerEntry',
    'LedgerRecorder',
    'KNOWN_VERDICTS',
    'load_baseline',
]
