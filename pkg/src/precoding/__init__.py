"""
Precoders under sum-power and per-antenna power constraints
"""

from .spc import PrecoderSPC, zf_spc, cb_spc, decompose, compose, gram_inverse, power_matrix
from .conjugate import CbPapcPrecoder, cb_papc_precoder, amplitude_mean, spc_papc_signal_ratio

__all__ = [
    'PrecoderSPC', 'zf_spc', 'cb_spc', 'decompose', 'compose', 'gram_inverse', 'power_matrix',
    'CbPapcPrecoder', 'cb_papc_precoder', 'amplitude_mean', 'spc_papc_signal_ratio',
]
