"""
Groups the exceptions raised by the lab and their process exit codes.

Numerical operations raise subclasses of CodimflowError; the command line
routers translate them with `exit_code_for()`:
  - 0: run finished and every pass flag is true.
  - 1: a check failed or a numerical operation gave up.
  - 2: configuration or usage error.

"""

from typing import Any



class CodimflowError(Exception):
    """Base error of the lab. `details` carries machine readable context."""

    exit_code = 1

    def __init__(self, message:str, **details:Any):
        super().__init__(message)
        self.message = message
        self.details = details


    def __str__(self) -> str:
        if not self.details:
            return self.message
        extra = ", ".join(f"{key}={value}" for key, value in self.details.items())
        return f"{self.message} ({extra})"


class DomainError(CodimflowError):
    """An operation was called outside of its domain."""


class ConvergenceError(CodimflowError):
    """An iterative method stopped before reaching its tolerance."""


class NumericalError(CodimflowError):
    """A NaN or an infinite value was produced."""


class ResolutionError(CodimflowError):
    """A point cloud is too coarse for the requested scale."""


class SpectralGapError(CodimflowError):
    """The spectrum of a mollified projection has no usable gap."""


class SmallnessGuardError(CodimflowError):
    """The measured Reifenberg flatness is above the construction guard."""


class PreconditionError(CodimflowError):
    """An experiment precondition does not hold at some sample."""


class ConfigError(CodimflowError):
    """The configuration or the command line is not valid."""

    exit_code = 2



def exit_code_for(error:Exception) -> int:
    """Return the process exit code for an exception raised during a run."""

    return getattr(error, "exit_code", 1)
