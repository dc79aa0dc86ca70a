"""
Minimum-multi-user-interference allocators
Each user keeps the SPC cross-antenna power ratios, so only K user powers
are chosen: linear scaling, a barrier Newton solve and a water-filling baseline
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..config import MMI_MAX_ITERATIONS, WF_MAX_ITERATIONS
from ..core.errors import DimensionError, DomainError, DegenerateChannelError
from ..precoding.spc import gram_inverse
from .barrier import SolverReport, SLACK_FLOOR, solve_inequality_barrier
from .mpu import to_vector

logger = logging.getLogger(__name__)

COLUMN_TOLERANCE = 1e-12
# Linear-scaling point is shrunk by this factor to start strictly inside
START_SHRINK = 0.95


@dataclass
class MmiProblem:
    """Zero-interference instance: p_mk = a_mk·x_k with columns of a_mmi summing to 1"""
    a_mmi: np.ndarray
    alpha: np.ndarray
    r: np.ndarray

    @property
    def m(self) -> int:
        return self.a_mmi.shape[0]

    @property
    def k(self) -> int:
        return self.a_mmi.shape[1]

    @property
    def per_antenna_cap(self) -> float:
        return 1.0 / self.m

    @property
    def cap_vector(self) -> np.ndarray:
        return np.full(self.m, 1.0 / self.m)


def build_mmi_problem(p_spc: np.ndarray) -> MmiProblem:
    """Normalize the SPC power matrix per user"""
    p_spc = np.asarray(p_spc, dtype=float)
    if p_spc.ndim != 2:
        raise DimensionError(f"power matrix must be M×K, got shape {p_spc.shape}")
    if np.any(p_spc < 0.0):
        raise DomainError("SPC power matrix must be non-negative")
    alpha = p_spc.sum(axis=0)
    if np.any(alpha <= 0.0):
        raise DegenerateChannelError("a user has zero SPC power")
    a_mmi = p_spc / alpha[np.newaxis, :]
    return MmiProblem(a_mmi=a_mmi, alpha=alpha, r=to_vector(p_spc))


def _validate(prob: MmiProblem) -> None:
    if prob.alpha.size != prob.k:
        raise DimensionError(f"alpha has {prob.alpha.size} entries for {prob.k} users")
    if np.any(prob.a_mmi < 0.0):
        raise DomainError("a_mmi must be non-negative")
    if np.max(np.abs(prob.a_mmi.sum(axis=0) - 1.0)) > COLUMN_TOLERANCE:
        raise DomainError("a_mmi columns must sum to 1")


def mmi_power_matrix(prob: MmiProblem, x: np.ndarray) -> np.ndarray:
    """M×K power matrix a_mk·x_k"""
    return prob.a_mmi * np.asarray(x, dtype=float)[np.newaxis, :]


def mmi_distance(prob: MmiProblem, x: np.ndarray) -> float:
    """‖√p − √r‖², which reduces to Σ_k(√x_k − √α_k)²"""
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    return float(np.sum((np.sqrt(x) - np.sqrt(prob.alpha)) ** 2))


def linear_scaling_allocate(prob: MmiProblem) -> Tuple[np.ndarray, np.ndarray]:
    """Scale the SPC allocation so the heaviest antenna sits exactly at 1/M"""
    _validate(prob)
    p_spc = mmi_power_matrix(prob, prob.alpha)
    q_max = float(np.max(p_spc.sum(axis=1)))
    if q_max <= 0.0:
        raise DegenerateChannelError("SPC allocation is all zero")
    scale = 1.0 / (prob.m * q_max)
    return p_spc * scale, prob.alpha * scale


def mmi_dual_bound(prob: MmiProblem, lam: np.ndarray) -> float:
    """
    Lagrange dual of the MMI problem at antenna multipliers λ >= 0.

    With w = A^MMI,ᵀλ, inf_{x >= 0} (√x − √α)² + w·x = α·w/(1 + w), so
    g(λ) = Σ_k α_k·w_k/(1 + w_k) − λᵀb.
    """
    w = prob.a_mmi.T @ np.asarray(lam, dtype=float)
    return float(np.sum(prob.alpha * w / (1.0 + w)) - np.sum(lam) / prob.m)


def mmi_newton_allocate(prob: MmiProblem, max_iterations: int = MMI_MAX_ITERATIONS) -> Tuple[np.ndarray, SolverReport]:
    """Minimize Σ(√x_k − √α_k)² over A^MMI·x <= 1/M, x >= 0"""
    _validate(prob)
    _, x_ls = linear_scaling_allocate(prob)
    sqrt_alpha = np.sqrt(prob.alpha)

    def objective(x):
        return float(np.sum((np.sqrt(np.maximum(x, SLACK_FLOOR)) - sqrt_alpha) ** 2))

    def gradient(x):
        return 1.0 - sqrt_alpha / np.sqrt(np.maximum(x, SLACK_FLOOR))

    def hessian(x):
        return np.diag(0.5 * sqrt_alpha * np.maximum(x, SLACK_FLOOR) ** -1.5)

    def change(x, z):
        dz = z - x
        return float(np.sum(dz - 2.0 * sqrt_alpha * dz / (np.sqrt(z) + np.sqrt(x))))

    x, report = solve_inequality_barrier(
        objective, gradient, hessian, prob.a_mmi, prob.cap_vector,
        START_SHRINK * x_ls, max_iterations, label="MMI-Opt",
        objective_change=change, dual_bound=lambda lam: mmi_dual_bound(prob, lam),
    )
    return x, report


def zf_effective_gains(h_measured: np.ndarray) -> np.ndarray:
    """Per-user received gain per unit power under ZF, 1/[(HHᴴ)⁻¹]_kk"""
    return 1.0 / np.real(np.diag(gram_inverse(h_measured)))


def waterfilling_dual_bound(prob: MmiProblem, snr: np.ndarray, lam: np.ndarray) -> float:
    """
    Lagrange dual of the sum-rate problem at antenna multipliers λ >= 0.

    Per user, inf_{x >= 0} w·x − log₂(1 + c·x) is 0 when w >= c/ln 2 and
    1/ln 2 − w/c − log₂(c/(w·ln 2)) otherwise; a user with w = 0 is unbounded.
    """
    w = prob.a_mmi.T @ np.asarray(lam, dtype=float)
    if np.any(w <= 0.0):
        return -np.inf
    log2 = np.log(2.0)
    interior = w < snr / log2
    values = np.where(
        interior,
        1.0 / log2 - w / snr - np.log2(snr / (w * log2)),
        0.0,
    )
    return float(np.sum(values) - np.sum(lam) / prob.m)


def waterfilling_allocate(
    prob: MmiProblem,
    channel_gains: np.ndarray,
    noise: np.ndarray,
    max_iterations: int = WF_MAX_ITERATIONS,
) -> Tuple[np.ndarray, SolverReport]:
    """Maximize Σ log₂(1 + g_k·x_k/σ²_k) over the MMI feasible set"""
    _validate(prob)
    gains = np.asarray(channel_gains, dtype=float).ravel()
    noise = np.broadcast_to(np.asarray(noise, dtype=float), gains.shape)
    if gains.size != prob.k:
        raise DimensionError(f"{gains.size} gains for {prob.k} users")
    if np.any(gains <= 0.0):
        raise DomainError("channel gains must be positive")
    if np.any(noise <= 0.0):
        raise DomainError("noise variances must be positive")

    snr = gains / noise
    log2 = np.log(2.0)

    def objective(x):
        return float(-np.sum(np.log1p(snr * np.maximum(x, 0.0)) / log2))

    def gradient(x):
        return -snr / (log2 * (1.0 + snr * x))

    def hessian(x):
        return np.diag(snr ** 2 / (log2 * (1.0 + snr * x) ** 2))

    def change(x, z):
        return float(-np.sum(np.log1p(snr * (z - x) / (1.0 + snr * x))) / log2)

    _, x_ls = linear_scaling_allocate(prob)
    x, report = solve_inequality_barrier(
        objective, gradient, hessian, prob.a_mmi, prob.cap_vector,
        START_SHRINK * x_ls, max_iterations, label="WF",
        objective_change=change, dual_bound=lambda lam: waterfilling_dual_bound(prob, snr, lam),
    )
    return x, report


def mmi_precoder(w_spc: np.ndarray, alpha: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Rescale each SPC column: w_k·sqrt(x_k/α_k)"""
    scale = np.sqrt(np.clip(np.asarray(x, dtype=float), 0.0, None) / np.asarray(alpha, dtype=float))
    return np.asarray(w_spc) * scale[np.newaxis, :]
