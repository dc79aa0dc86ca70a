"""
Rayleigh channel model
Draws i.i.d. complex Gaussian channels and mixes in a scalar-correlation CSI error
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..core.errors import DimensionError, DomainError, DegenerateChannelError

logger = logging.getLogger(__name__)

# Substream ids used with derive_seed
STREAM_CHANNEL = 0
STREAM_CSI_ERROR = 1


@dataclass(frozen=True)
class ChannelSet:
    """Ideal and measured channels of one trial"""
    h_ideal: np.ndarray
    h_measured: np.ndarray
    beta: float
    seed: int

    @property
    def m(self) -> int:
        return self.h_ideal.shape[1]

    @property
    def k(self) -> int:
        return self.h_ideal.shape[0]


def _check_seed(seed: int) -> int:
    if seed is None or int(seed) < 0 or int(seed) >= 2 ** 64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)


def derive_seed(seed: int, trial: int, stream: int) -> int:
    """Derive the 64-bit seed of substream (trial, stream) from a master seed"""
    if trial < 0 or stream < 0:
        raise DomainError(f"trial and stream must be non-negative, got ({trial}, {stream})")
    seq = np.random.SeedSequence(_check_seed(seed), spawn_key=(int(trial), int(stream)))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def channel_rng(seed: int) -> np.random.Generator:
    """Create the PCG64 generator for a seed"""
    return np.random.Generator(np.random.PCG64(_check_seed(seed)))


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    # Unit total variance, 1/2 per real and imaginary part
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def generate_channel(m: int, k: int, seed: int) -> np.ndarray:
    """Generate a K×M i.i.d. circularly-symmetric complex Gaussian channel"""
    if int(k) < 1 or int(m) < 1 or int(k) > int(m):
        raise DimensionError(f"need 1 <= k <= m, got m={m}, k={k}")
    rng = channel_rng(seed)
    return _complex_gaussian(rng, (int(k), int(m)))


def apply_csi_error(h_ideal: np.ndarray, beta: float, seed: int) -> ChannelSet:
    """
    Build the measured channel from the ideal one.

    Each measured row keeps the ideal row norm and has direction
    beta * u + sqrt(1 - beta^2) * v, with u the ideal direction and v a
    seeded Gaussian direction made orthogonal to u.
    """
    h_ideal = np.asarray(h_ideal, dtype=complex)
    if h_ideal.ndim != 2:
        raise DimensionError(f"h_ideal must be a K×M matrix, got shape {h_ideal.shape}")
    if not np.isfinite(beta) or beta < 0.0 or beta > 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")

    norms = np.linalg.norm(h_ideal, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise DegenerateChannelError("ideal channel has an all-zero row")
    u = h_ideal / norms

    # One Gram-Schmidt step against the ideal direction
    g = _complex_gaussian(channel_rng(seed), h_ideal.shape)
    v = g - np.sum(u.conj() * g, axis=1, keepdims=True) * u
    v = v / np.linalg.norm(v, axis=1, keepdims=True)

    direction = beta * u + np.sqrt(max(0.0, 1.0 - beta * beta)) * v
    h_measured = norms * direction

    logger.debug(f"CSI error applied: K={h_ideal.shape[0]}, M={h_ideal.shape[1]}, beta={beta}")
    return ChannelSet(h_ideal=h_ideal.copy(), h_measured=h_measured, beta=float(beta), seed=int(seed))
