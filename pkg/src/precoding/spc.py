"""
Sum-power-constrained precoders
Zero-forcing and conjugate beamforming with total transmit power 1,
plus the polar decomposition used to move between power and phase
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from ..core.errors import DimensionError, DomainError, SingularChannelError, DegenerateChannelError

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
NEGATIVE_POWER_TOLERANCE = 1e-12

ZF = "ZF"
CB = "CB"


@dataclass
class PrecoderSPC:
    """SPC precoder with its magnitude/phase decomposition"""
    w: np.ndarray
    xi: np.ndarray
    theta: np.ndarray
    phi: float
    alpha: np.ndarray
    kind: str

    @property
    def power(self) -> np.ndarray:
        """M×K power matrix xi²"""
        return self.xi ** 2

    @property
    def m(self) -> int:
        return self.w.shape[0]

    @property
    def k(self) -> int:
        return self.w.shape[1]


def _as_channel(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim == 1:
        h = h[np.newaxis, :]
    if h.ndim != 2 or h.shape[0] < 1:
        raise DimensionError(f"channel must be a K×M matrix, got shape {h.shape}")
    return h


def gram_inverse(h: np.ndarray) -> np.ndarray:
    """(HHᴴ)⁻¹ through a K×K Cholesky factorization"""
    h = _as_channel(h)
    k, m = h.shape
    if k > m:
        raise DimensionError(f"zero-forcing needs K <= M, got K={k}, M={m}")

    gram = h @ h.conj().T
    try:
        factor = cho_factor(gram, lower=True)
        inverse = cho_solve(factor, np.eye(k, dtype=complex))
    except LinAlgError as e:
        raise SingularChannelError(f"channel Gram matrix is not positive definite: {e}") from e

    inverse = 0.5 * (inverse + inverse.conj().T)
    condition = np.linalg.norm(gram, 1) * np.linalg.norm(inverse, 1)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularChannelError(f"channel Gram matrix condition estimate {condition:.3e} exceeds {CONDITION_LIMIT:.0e}")
    return inverse


def decompose(w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Split a complex matrix into magnitudes and phases in (-π, π]"""
    w = np.asarray(w, dtype=complex)
    xi = np.abs(w)
    theta = np.angle(w)
    theta = np.where(theta <= -np.pi, theta + 2.0 * np.pi, theta)
    return xi, theta


def compose(p_alloc: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Rebuild a precoder from a power matrix and a phase matrix"""
    p_alloc = np.asarray(p_alloc, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if p_alloc.shape != theta.shape:
        raise DimensionError(f"power shape {p_alloc.shape} does not match phase shape {theta.shape}")
    if p_alloc.size and p_alloc.min() < -NEGATIVE_POWER_TOLERANCE:
        raise DomainError(f"negative power entry {p_alloc.min():.3e}")
    p_alloc = np.clip(p_alloc, 0.0, None)
    return np.sqrt(p_alloc) * np.exp(1j * theta)


def _build(w: np.ndarray, phi: float, kind: str) -> PrecoderSPC:
    xi, theta = decompose(w)
    alpha = np.sum(xi ** 2, axis=0)
    return PrecoderSPC(w=w, xi=xi, theta=theta, phi=float(phi), alpha=alpha, kind=kind)


def zf_spc(h: np.ndarray) -> PrecoderSPC:
    """Zero-forcing precoder Hᴴ(HHᴴ)⁻¹√φ with φ = 1/Tr[(HHᴴ)⁻¹]"""
    h = _as_channel(h)
    inverse = gram_inverse(h)
    phi = 1.0 / np.real(np.trace(inverse))
    w = (h.conj().T @ inverse) * np.sqrt(phi)
    logger.debug(f"ZF-SPC built: K={h.shape[0]}, M={h.shape[1]}, phi={phi:.4g}")
    return _build(w, phi, ZF)


def cb_spc(h: np.ndarray) -> PrecoderSPC:
    """Conjugate beamforming precoder √φ·Hᴴ with φ = 1/Tr(HHᴴ)"""
    h = _as_channel(h)
    row_power = np.sum(np.abs(h) ** 2, axis=1)
    if np.any(row_power == 0.0):
        raise DegenerateChannelError("channel has an all-zero row")
    phi = 1.0 / np.sum(row_power)
    w = np.sqrt(phi) * h.conj().T
    return _build(w, phi, CB)


def power_matrix(precoder: PrecoderSPC) -> np.ndarray:
    """M×K power matrix of an SPC precoder"""
    return precoder.power
