"""
q-algebra toolkit
Series, q-calculus, deformed symmetry operators, non-commutative algebras and their physics checks
"""
from .errors import (
    QSymError,
    NVarsMismatchError,
    DomainError,
    DegenerateDeformationError,
    NonConvergenceError,
    SingularModeError,
    LimitUndefinedError,
    RewriteLimitError,
)
from .series import TruncatedSeries, add, multiply, differentiate, evaluate, scale_argument
from .qcore import (
    Deformation,
    qnumber,
    qfactorial,
    q_derivative,
    jackson_integral,
    jackson_partial_sum,
    q_exponential,
)
from .dilation import (
    DiagonalOperator,
    dilation_op,
    sqrt_realization,
    integral_action_op,
    q3_realization,
    limit_spectrum,
    first_order_expansion,
)
from .symmetry1d import (
    PotentialSpec,
    HamiltonianSpec,
    PartitionPotentialSpec,
    apply_hamiltonian,
    invariance_residual,
    recursion_invariance,
    gauge_transform_potential,
    qprimitive_transform,
    solve_q_independent,
    partition_recursion,
    deform_coulomb_curve,
)
from .ncalgebra import NCPoly, RewriteSystem, normal_order, commutator, verify_identity, confluence_fuzz
from .ncplane import PdeOperator, SolutionCandidate, bessel_quarter, pde_residual, general_q_operator
from .perturb import WaveVector, GaugeField, vector_potential, phase_integral, effective_field

__all__ = [
    "QSymError",
    "NVarsMismatchError",
    "DomainError",
    "DegenerateDeformationError",
    "NonConvergenceError",
    "SingularModeError",
    "LimitUndefinedError",
    "RewriteLimitError",
    "TruncatedSeries",
    "add",
    "multiply",
    "differentiate",
    "evaluate",
    "scale_argument",
    "Deformation",
    "qnumber",
    "qfactorial",
    "q_derivative",
    "jackson_integral",
    "jackson_partial_sum",
    "q_exponential",
    "DiagonalOperator",
    "dilation_op",
    "sqrt_realization",
    "integral_action_op",
    "q3_realization",
    "limit_spectrum",
    "first_order_expansion",
    "PotentialSpec",
    "HamiltonianSpec",
    "PartitionPotentialSpec",
    "apply_hamiltonian",
    "invariance_residual",
    "recursion_invariance",
    "gauge_transform_potential",
    "qprimitive_transform",
    "solve_q_independent",
    "partition_recursion",
    "deform_coulomb_curve",
    "NCPoly",
    "RewriteSystem",
    "normal_order",
    "commutator",
    "verify_identity",
    "confluence_fuzz",
    "PdeOperator",
    "SolutionCandidate",
    "bessel_quarter",
    "pde_residual",
    "general_q_operator",
    "WaveVector",
    "GaugeField",
    "vector_potential",
    "phase_integral",
    "effective_field",
]
