"""
Exception hierarchy for the q-algebra toolkit
"""
from typing import Iterable, List


class QSymError(Exception):
    """Base class for every toolkit failure"""


class NVarsMismatchError(QSymError, ValueError):
    """Operands live in polynomial rings of different dimension"""

    def __init__(self, left: int, right: int):
        super().__init__(f"nvars mismatch: {left} vs {right}")
        self.left = left
        self.right = right


class DomainError(QSymError, ValueError):
    """Argument outside the domain of an operation"""


class DegenerateDeformationError(QSymError):
    """A q-number [n] vanishes for the requested deformation"""

    def __init__(self, n: int, message: str = ""):
        super().__init__(message or f"q-number [{n}] vanishes (q is a root of unity)")
        self.n = n


class NonConvergenceError(QSymError):
    """A q-sum does not converge for the requested deformation"""


class SingularModeError(QSymError):
    """Mode factor 1 - q^(-k) vanishes on a nonzero coefficient"""

    def __init__(self, modes: Iterable[int], message: str = ""):
        self.modes: List[int] = sorted(set(int(m) for m in modes))
        super().__init__(message or f"singular modes k = {self.modes}")


class LimitUndefinedError(QSymError):
    """Analytic limit of a spectrum does not exist"""

    def __init__(self, j: int, s0: float):
        super().__init__(f"limit of spectrum at j = {j}, s -> {s0} does not exist")
        self.j = j
        self.s0 = s0


class RewriteLimitError(QSymError):
    """Normal ordering exceeded its rewrite budget"""
