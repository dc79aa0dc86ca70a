"""
Rate metrics
SINR and sum-rate evaluation of a precoder against the ideal channel,
plus per-antenna power auditing
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DimensionError, DomainError

TIGHT_TOLERANCE = 1e-9


@dataclass
class RateReport:
    """Per-user SINRs and rates of one precoder"""
    sinr: np.ndarray
    rates: np.ndarray
    sum_rate: float
    interference_power: np.ndarray
    papc_violation: float


def evaluate(h_ideal: np.ndarray, w: np.ndarray, noise: np.ndarray) -> RateReport:
    """γ_k = |h_kᵀw_k|² / (Σ_{l≠k}|h_kᵀw_l|² + σ²_k) and Σ log₂(1+γ_k)"""
    h = np.asarray(h_ideal, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if h.ndim != 2 or w.ndim != 2 or h.shape[1] != w.shape[0] or h.shape[0] != w.shape[1]:
        raise DimensionError(f"channel {h.shape} and precoder {w.shape} do not agree")
    k = h.shape[0]
    noise = np.broadcast_to(np.asarray(noise, dtype=float), (k,))
    if np.any(noise <= 0.0):
        raise DomainError("noise variances must be positive")

    gains = np.abs(h @ w) ** 2
    signal = np.diag(gains).copy()
    interference = gains.sum(axis=1) - signal
    sinr = signal / (np.clip(interference, 0.0, None) + noise)
    rates = np.log2(1.0 + sinr)
    violation, _ = audit_papc(w, 1.0 / w.shape[0])
    return RateReport(
        sinr=sinr,
        rates=rates,
        sum_rate=float(rates.sum()),
        interference_power=gains,
        papc_violation=violation,
    )


def audit_papc(w: np.ndarray, cap: float) -> Tuple[float, int]:
    """Largest antenna power above cap, and the number of antennas at the cap"""
    if cap <= 0.0:
        raise DomainError(f"cap must be positive, got {cap}")
    antenna_power = np.sum(np.abs(np.asarray(w)) ** 2, axis=1)
    excess = antenna_power - cap
    return float(excess.max()), int(np.sum(np.abs(excess) <= TIGHT_TOLERANCE))


def noise_variance(snr_db: float) -> float:
    """σ² for a total transmit power of 1"""
    return 10.0 ** (-snr_db / 10.0)
