"""
Exception hierarchy for emodel-lab.
"""
from typing import Any, Dict, Optional


class EModelError(Exception):
    """Base class for all library errors"""


class DimensionMismatchError(EModelError, ValueError):
    """Operands live in algebras of different size"""

    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"Dimension mismatch: expected {expected}, got {got}")


class DomainError(EModelError, ValueError):
    """Input outside the domain of an operation (eta <= 0, non-unitary k, wrong N, ...)"""


class ChartDomainError(DomainError):
    """Point outside the affine chart |chi| < 1"""

    def __init__(self, norm: float):
        self.norm = norm
        super().__init__(f"Chart violation: |chi| = {norm:.17g} is not below 1 - 1e-10")


class PoleError(EModelError, ZeroDivisionError):
    """Spectral evaluator hit a pole; `denominator` names the vanishing expression"""

    def __init__(self, denominator: str, value: complex):
        self.denominator = denominator
        self.value = value
        super().__init__(f"Pole: {denominator} = {value!r}")


class SingularOperatorError(EModelError, ArithmeticError):
    """Linear solve on a numerically singular operator block"""

    def __init__(self, what: str, condition_number: float):
        self.what = what
        self.condition_number = condition_number
        super().__init__(f"Singular {what}: condition number {condition_number:.3e}")


class NumericalAbortError(EModelError, ArithmeticError):
    """Integration produced a non-finite state"""

    def __init__(self, message: str, diagnostic: Optional[Dict[str, Any]] = None):
        self.diagnostic = diagnostic or {}
        super().__init__(message)


class ConfigError(EModelError, ValueError):
    """Invalid experiment configuration; `field` names the offending key"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
