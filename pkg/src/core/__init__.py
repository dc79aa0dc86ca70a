"""
Core modules for the PAPC simulator
Errors and metrics; the experiment harness lives in src.core.experiment
"""

from .errors import (
    PapcError, DimensionError, DomainError, SingularChannelError,
    DegenerateChannelError, ParameterError, NumericalFailureError,
    ConfigError, OutputError,
)
from .metrics import RateReport, evaluate, audit_papc, noise_variance

__all__ = [
    'PapcError', 'DimensionError', 'DomainError', 'SingularChannelError',
    'DegenerateChannelError', 'ParameterError', 'NumericalFailureError',
    'ConfigError', 'OutputError',
    'RateReport', 'evaluate', 'audit_papc', 'noise_variance',
]
