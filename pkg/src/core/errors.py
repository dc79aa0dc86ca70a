"""
Exception hierarchy for the PAPC simulator
Library code raises these; the application layer maps them to exit codes
"""


class PapcError(Exception):
    """Base class for all simulator errors"""


class DimensionError(PapcError, ValueError):
    """Invalid or mismatched array dimensions"""


class DomainError(PapcError, ValueError):
    """Argument outside its mathematical domain"""


class SingularChannelError(PapcError):
    """Channel Gram matrix is not (numerically) positive definite"""


class DegenerateChannelError(PapcError):
    """All-zero channel row or all-zero power allocation"""


class ParameterError(PapcError, ValueError):
    """Solver parameter outside its admissible range"""


class NumericalFailureError(PapcError):
    """A computation produced a result outside its tolerance"""


class ConfigError(PapcError):
    """Invalid experiment configuration"""


class OutputError(PapcError):
    """Failure writing or reading a result file"""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")
