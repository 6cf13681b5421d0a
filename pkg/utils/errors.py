"""
Error hierarchy
Location: abw_lab/utils/errors.py

Every error knows the exit code the CLI reports for it:
0 success, 2 validation, 3 numeric convergence, 4 internal consistency.
"""

from typing import Optional


class AbwError(Exception):
    """Base class for all errors raised by this project"""

    exit_code = 1


class InputValidationError(AbwError, ValueError):
    """Malformed input: bad subsets, out-of-range parameters, n mismatch"""

    exit_code = 2


class MismatchedGrassmannianError(InputValidationError):
    """Classes living on different Gr(r, n) were combined"""


class CoefficientOverflowError(AbwError, OverflowError):
    """A structure constant left the 64-bit range"""

    exit_code = 4


class NumericConvergenceError(AbwError, ArithmeticError):
    """An iterative numeric routine did not reach its tolerance"""

    exit_code = 3

    def __init__(self, message: str, residual: Optional[float] = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class PlaquetteBranchError(NumericConvergenceError):
    """A plaquette holonomy sits too close to the principal-log branch cut"""


class DegenerateSamplingError(NumericConvergenceError):
    """A sampled path is too short or its parameters do not increase"""


class InternalConsistencyError(AbwError, RuntimeError):
    """Two independent computations of the same quantity disagree"""

    exit_code = 4


def exit_code_for(error: BaseException) -> int:
    """Map any exception to a CLI exit code."""
    if isinstance(error, AbwError):
        return error.exit_code
    # pydantic.ValidationError is a ValueError
    if isinstance(error, ValueError):
        return 2
    return 1
