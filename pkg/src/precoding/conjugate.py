"""
Conjugate beamforming under per-antenna power constraints
Every antenna carries user k with power α_k/M and the conjugate channel phase
"""

from dataclasses import dataclass

import numpy as np

from ..core.errors import DimensionError, DomainError

SUM_TOLERANCE = 1e-10


@dataclass
class CbPapcPrecoder:
    """CB precoder with equal per-antenna power per user"""
    w: np.ndarray
    alpha: np.ndarray


def cb_papc_precoder(h_measured: np.ndarray, alpha: np.ndarray) -> CbPapcPrecoder:
    """Build w_mk = sqrt(α_k/M)·exp(-j·∠h_km)"""
    h = np.asarray(h_measured, dtype=complex)
    alpha = np.asarray(alpha, dtype=float).ravel()
    if h.ndim != 2 or h.shape[0] != alpha.size:
        raise DimensionError(f"channel shape {h.shape} does not match {alpha.size} user powers")
    if np.any(alpha < 0.0) or abs(alpha.sum() - 1.0) > SUM_TOLERANCE:
        raise DomainError(f"user powers must be non-negative and sum to 1, got sum {alpha.sum():.12f}")

    m = h.shape[1]
    # np.angle(0) == 0 gives zero entries the zero phase
    w = np.sqrt(alpha / m)[np.newaxis, :] * np.exp(-1j * np.angle(h).T)
    return CbPapcPrecoder(w=w, alpha=alpha)


def amplitude_mean(h: np.ndarray) -> np.ndarray:
    """Per-row mean entry magnitude Σ_m|h_km|/M"""
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    return np.mean(np.abs(h), axis=1)


def spc_papc_signal_ratio(h: np.ndarray) -> np.ndarray:
    """Per-row M·‖h‖²/(Σ_m|h_m|)², the CB-SPC to CB-PAPC signal-power ratio"""
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    norm_sq = np.sum(np.abs(h) ** 2, axis=1)
    amp_sum = np.sum(np.abs(h), axis=1)
    return h.shape[1] * norm_sq / amp_sum ** 2
