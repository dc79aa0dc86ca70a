"""
Closed-form approximations
Pseudo-inverse asymptotics, the linear-scaling modifying factor, SINR-gap
estimates under CSI error, the conjugate-beamforming 4/π gap and rate estimates
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..core.errors import DomainError

logger = logging.getLogger(__name__)

SPC_ZF = "SPC-ZF"
MPU_PROJ_ZF = "MPU-Proj-ZF"
MPU_OPT_ZF = "MPU-Opt-ZF"
MMI_LS_ZF = "MMI-LS-ZF"
MMI_OPT_ZF = "MMI-Opt-ZF"
WF_ZF = "WF-ZF"
SPC_CB = "SPC-CB"
PAPC_CB = "PAPC-CB"
EST_LS_ZF = "Est-LS-ZF"

# Below this correlation MPU-Opt-ZF wins at every SNR
RECOMMEND_BETA_LIMIT = 0.9
# SNR above which MMI-LS-ZF overtakes MPU-Opt-ZF with accurate CSI
RECOMMEND_CROSSOVER_DB = 15.0


@dataclass(frozen=True)
class ApproxParams:
    """Constants of the linear-scaling modifying factor"""
    p: float = 1.0 / 5.0
    q: float = 1.0 / 4.0
    beta_ls: float = 1.0 / 8.0

    def __post_init__(self):
        if self.p <= 0.0 or self.q <= 0.0 or self.beta_ls <= 0.0:
            raise DomainError(f"approximation constants must be positive, got {self}")


@dataclass(frozen=True)
class GapEstimate:
    """SINR ratio of SPC-ZF over linear scaling"""
    g_linear: float
    g_db: float
    gamma_n2i: float


DEFAULT_PARAMS = ApproxParams()


def db(value: float) -> float:
    """Linear power ratio to dB"""
    return 10.0 * math.log10(value)


def from_db(value_db: float) -> float:
    """dB to linear power ratio"""
    return 10.0 ** (value_db / 10.0)


def frob_pinv_approx(m: int, k: int) -> float:
    """Large-system value K/(M−K) of Tr[(HHᴴ)⁻¹]"""
    if k >= m or k < 1:
        raise DomainError(f"need 1 <= k < m, got m={m}, k={k}")
    return k / (m - k)


def _check_half_load(k: int, m: int) -> None:
    if k < 1 or 2 * k > m:
        raise DomainError(f"need 1 <= K <= M/2, got K={k}, M={m}")


def f_ls(k: int, m: int, params: ApproxParams = DEFAULT_PARAMS) -> float:
    """Modifying factor (M/2K)^p + β_LS·(M/2K)^q"""
    _check_half_load(k, m)
    ratio = m / (2.0 * k)
    return ratio ** params.p + params.beta_ls * ratio ** params.q


def qmax_approx(m: int, k: int, params: ApproxParams = DEFAULT_PARAMS) -> float:
    """Approximate largest squared row norm of the pseudo-inverse"""
    return k * f_ls(k, m, params) / ((m - k) * m)


def n2i_estimate(sigma2: float, k: int, m: int, beta: float) -> float:
    """Noise-to-interference ratio σ²K(M−K+1)/(M(1−β²)(K−2)); +inf when β = 1"""
    if k <= 2:
        raise DomainError(f"noise-to-interference estimate needs K >= 3, got K={k}")
    if beta < 0.0 or beta > 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    if sigma2 < 0.0:
        raise DomainError(f"noise variance must be non-negative, got {sigma2}")
    if sigma2 == 0.0:
        return 0.0
    interference = m * (1.0 - beta * beta) * (k - 2)
    if interference <= 0.0:
        return math.inf
    return sigma2 * k * (m - k + 1) / interference


def ls_gap_estimate(sigma2: float, k: int, m: int, beta: float, params: ApproxParams = DEFAULT_PARAMS) -> GapEstimate:
    """SINR gap f − (f−1)/(1+γ) of linear scaling relative to SPC-ZF"""
    f = f_ls(k, m, params)
    if beta == 1.0:
        if k <= 2:
            raise DomainError(f"noise-to-interference estimate needs K >= 3, got K={k}")
        return GapEstimate(g_linear=f, g_db=db(f), gamma_n2i=math.inf)
    gamma = n2i_estimate(sigma2, k, m, beta)
    g = f - (f - 1.0) / (1.0 + gamma)
    return GapEstimate(g_linear=g, g_db=db(g), gamma_n2i=gamma)


def ls_gap_expanded(sigma2: float, k: int, m: int, beta: float, params: ApproxParams = DEFAULT_PARAMS) -> float:
    """Same gap written as one fraction; kept as a cross-check"""
    f = f_ls(k, m, params)
    interference = m * (1.0 - beta * beta) * (k - 2)
    noise = k * (m - k + 1) * sigma2
    if interference + noise == 0.0:
        return 1.0
    return f - m * (f - 1.0) * (1.0 - beta * beta) * (k - 2) / (interference + noise)


def cb_gap_estimate() -> float:
    """CB SINR loss from per-antenna constraints, 4/π"""
    return 4.0 / math.pi


def cb_rate_loss() -> float:
    """High-SNR per-user rate loss log₂(4/π) in bits/s/Hz"""
    return math.log2(cb_gap_estimate())


def ls_rate_estimate(sinr_opt: np.ndarray, gap: GapEstimate) -> float:
    """Σ_k log₂(1 + SINR_k/G)"""
    sinr_opt = np.asarray(sinr_opt, dtype=float)
    return float(np.sum(np.log2(1.0 + sinr_opt / gap.g_linear)))


def cb_papc_rate_estimate(sinr_cb_spc: np.ndarray) -> float:
    """PAPC-CB sum rate predicted from CB-SPC SINRs"""
    sinr_cb_spc = np.asarray(sinr_cb_spc, dtype=float)
    return float(np.sum(np.log2(1.0 + sinr_cb_spc / cb_gap_estimate())))


def recommend_method(beta: float, snr_db: float, crossover_db: float = RECOMMEND_CROSSOVER_DB) -> str:
    """Pick the ZF allocator for a CSI quality and operating SNR"""
    if beta < 0.0 or beta > 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    if beta < RECOMMEND_BETA_LIMIT:
        return MPU_OPT_ZF
    return MMI_LS_ZF if snr_db >= crossover_db else MPU_OPT_ZF
