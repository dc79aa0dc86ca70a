"""
Channel generation and CSI-error modeling
"""

from .model import (
    ChannelSet, generate_channel, apply_csi_error, derive_seed, channel_rng,
    STREAM_CHANNEL, STREAM_CSI_ERROR,
)

__all__ = [
    'ChannelSet', 'generate_channel', 'apply_csi_error', 'derive_seed', 'channel_rng',
    'STREAM_CHANNEL', 'STREAM_CSI_ERROR',
]
