"""
Maximum-power-utilization allocators
Every antenna transmits exactly 1/M; the allocation stays as close as possible
to the SPC power pattern in the ‖√x − √r‖² sense
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..config import (
    MPU_MAX_ITERATIONS, NEWTON_TOLERANCE, BARRIER_MU, BARRIER_GAP_TOLERANCE,
    LINE_SEARCH_ALPHA, LINE_SEARCH_BETA,
)
from ..core.errors import DimensionError, DomainError, ParameterError, NumericalFailureError
from .barrier import (
    SolverReport, BOUNDARY_FRACTION, MAX_BACKTRACKS,
    barrier_stage_count_reached, initial_barrier_parameter,
)

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-10
CLAMP_TOLERANCE = 1e-9
# Weight of the uniform point mixed into a projection start that touches zero
INTERIOR_SHIFT = 1e-3


@dataclass
class MpuProblem:
    """
    Maximum-power-utilization instance.

    r is vec(P) of the SPC power matrix, stacked user by user, so entry
    r[k*M + m] is the power of user k on antenna m.
    """
    r: np.ndarray
    m: int
    k: int

    @property
    def per_antenna_cap(self) -> float:
        return 1.0 / self.m

    @property
    def power(self) -> np.ndarray:
        """M×K view of r"""
        return to_matrix(self.r, self.m, self.k)

    @classmethod
    def from_power(cls, p_spc: np.ndarray) -> 'MpuProblem':
        """Build the instance from an M×K SPC power matrix"""
        p_spc = np.asarray(p_spc, dtype=float)
        if p_spc.ndim != 2:
            raise DimensionError(f"power matrix must be M×K, got shape {p_spc.shape}")
        m, k = p_spc.shape
        return cls(r=to_vector(p_spc), m=m, k=k).validated()

    def validated(self) -> 'MpuProblem':
        """Check the instance invariants and return self"""
        self.r = np.asarray(self.r, dtype=float).ravel()
        if self.m < 1 or self.k < 1 or self.r.size != self.m * self.k:
            raise DimensionError(f"r has {self.r.size} entries, expected M·K = {self.m}·{self.k}")
        if np.any(self.r < 0.0):
            raise DomainError("r must be entrywise non-negative")
        if abs(self.r.sum() - 1.0) > SUM_TOLERANCE:
            raise DomainError(f"r must sum to 1, got {self.r.sum():.12f}")
        return self


def to_vector(p: np.ndarray) -> np.ndarray:
    """vec(P), stacking the columns of an M×K matrix"""
    return np.asarray(p, dtype=float).reshape(-1, order='F')


def to_matrix(x: np.ndarray, m: int, k: int) -> np.ndarray:
    """Inverse of to_vector"""
    return np.asarray(x, dtype=float).reshape((m, k), order='F')


def antenna_sums(x: np.ndarray, m: int, k: int) -> np.ndarray:
    """Ax for A = [I_M ... I_M]"""
    return to_matrix(x, m, k).sum(axis=1)


def equality_matrix(m: int, k: int) -> np.ndarray:
    """Dense A = [I_M ... I_M] (M × MK)"""
    return np.tile(np.eye(m), (1, k))


def min_a_threshold(m: int, k: int) -> float:
    """Smallest projection parameter a that keeps the projection non-negative"""
    if m * k < 2:
        raise DomainError(f"need M·K >= 2, got M={m}, K={k}")
    return m * m * k / (m * k - 1.0)


def gram_inverse_exact(m: int, k: int) -> np.ndarray:
    """Exact (K·I + E/M²)⁻¹ from the rank-one update identity"""
    return np.eye(m) / k - np.ones((m, m)) / (k * (m * m * k + m))


def gram_inverse_neumann(m: int, k: int) -> np.ndarray:
    """First-order Neumann approximation I/K − E/(M²K²)"""
    return np.eye(m) / k - np.ones((m, m)) / (m * m * k * k)


def _apply_gram_inverse(v: np.ndarray, m: int, k: int) -> np.ndarray:
    # Structured G⁻¹v in O(M)
    return v / k - v.sum() / (k * (m * m * k + m))


def project_null_space(z: np.ndarray, m: int, k: int) -> np.ndarray:
    """Orthogonal projection of an (MK+1)-vector onto the null space of [A, b]"""
    z = np.asarray(z, dtype=float)
    x, last = z[:-1], z[-1]
    residual = antenna_sums(x, m, k) + last / m
    y = _apply_gram_inverse(residual, m, k)
    projected_x = x - np.tile(y, k)
    projected_last = last - y.sum() / m
    return np.append(projected_x, projected_last)


def projection_matrix_dense(m: int, k: int) -> np.ndarray:
    """Explicit projector I − Ãᵀ(ÃÃᵀ)⁻¹Ã, for small instances"""
    a_aug = np.hstack([equality_matrix(m, k), np.full((m, 1), 1.0 / m)])
    return np.eye(m * k + 1) - a_aug.T @ np.linalg.solve(a_aug @ a_aug.T, a_aug)


def _renormalize_antennas(x: np.ndarray, m: int, k: int) -> np.ndarray:
    p = to_matrix(x, m, k)
    p = p * ((1.0 / m) / p.sum(axis=1))[:, np.newaxis]
    return to_vector(p)


def orthogonal_projection_allocate(prob: MpuProblem, a: Optional[float] = None) -> Tuple[np.ndarray, SolverReport]:
    """Project [r; −a] onto the null space of [A, b] and rescale by the last entry"""
    prob.validated()
    m, k = prob.m, prob.k
    threshold = min_a_threshold(m, k)
    if a is None:
        a = threshold
    if a < threshold * (1.0 - 1e-12):
        raise ParameterError(f"a = {a} is below the non-negativity threshold {threshold}")

    z = project_null_space(np.append(prob.r, -a), m, k)
    x = z[:-1] / (-z[-1])

    if x.min() < -CLAMP_TOLERANCE:
        raise NumericalFailureError(f"projection produced entry {x.min():.3e} below −{CLAMP_TOLERANCE}")
    if x.min() < 0.0:
        x = _renormalize_antennas(np.clip(x, 0.0, None), m, k)

    report = SolverReport(
        iterations=0,
        final_objective=mpu_distance(x, prob.r),
        equality_residual=float(np.max(np.abs(antenna_sums(x, m, k) - 1.0 / m))),
        min_x=float(x.min()),
        converged=True,
        method="MPU-Proj",
    )
    return to_matrix(x, m, k), report


def mpu_distance(x: np.ndarray, r: np.ndarray) -> float:
    """‖√x − √r‖²"""
    return float(np.sum((np.sqrt(np.clip(x, 0.0, None)) - np.sqrt(r)) ** 2))


def _check_positive(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("barrier point must be strictly positive")
    return x


def mpu_barrier_objective(x: np.ndarray, r: np.ndarray, t: float) -> float:
    """t·Σ(√x − √r)² − Σ log x"""
    x = _check_positive(x)
    return float(t * np.sum((np.sqrt(x) - np.sqrt(r)) ** 2) - np.sum(np.log(x)))


def mpu_barrier_gradient(x: np.ndarray, r: np.ndarray, t: float) -> np.ndarray:
    """t(1 − √(r/x)) − 1/x"""
    x = _check_positive(x)
    return t * (1.0 - np.sqrt(r / x)) - 1.0 / x


def mpu_barrier_hessian_diag(x: np.ndarray, r: np.ndarray, t: float) -> np.ndarray:
    """(t/2)·√r·x^(−3/2) + 1/x²"""
    x = _check_positive(x)
    return 0.5 * t * np.sqrt(r) * x ** -1.5 + 1.0 / x ** 2


def structured_newton_step(hess_diag: np.ndarray, grad: np.ndarray, m: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Equality-constrained Newton step for A = [I_M ... I_M] in O(MK).

    With a diagonal Hessian the KKT system decouples per antenna:
    ν_m = −Σ_k(g/h) / Σ_k(1/h) and Δx = −(g + ν_m)/h.
    """
    h = to_matrix(hess_diag, m, k)
    g = to_matrix(grad, m, k)
    nu = -np.sum(g / h, axis=1) / np.sum(1.0 / h, axis=1)
    dx = -(g + nu[:, np.newaxis]) / h
    return to_vector(dx), nu


def dense_newton_step(hess_diag: np.ndarray, grad: np.ndarray, a_eq: np.ndarray) -> np.ndarray:
    """Newton step from the full KKT system, equality rows scaled by MK"""
    n = grad.size
    a_scaled = n * np.asarray(a_eq, dtype=float)
    p = a_scaled.shape[0]
    kkt = np.block([
        [np.diag(hess_diag), a_scaled.T],
        [a_scaled, np.zeros((p, p))],
    ])
    rhs = np.concatenate([-grad, np.zeros(p)])
    return np.linalg.solve(kkt, rhs)[:n]


def _starting_point(prob: MpuProblem) -> np.ndarray:
    p_proj, _ = orthogonal_projection_allocate(prob)
    x0 = to_vector(p_proj)
    if x0.min() <= 0.0:
        uniform = np.full(x0.size, 1.0 / x0.size)
        x0 = (1.0 - INTERIOR_SHIFT) * x0 + INTERIOR_SHIFT * uniform
    return x0


def mpu_dual_bound(prob: MpuProblem, nu: np.ndarray) -> float:
    """
    Lagrange dual g(ν) of the MPU problem for per-antenna multipliers ν > −1.

    inf_{x >= 0} (√x − √r)² + ν·x = r·ν/(1 + ν), so per antenna the bound is
    ν_m·(s_m/(1 + ν_m) − 1/M) with s_m the antenna's SPC power.
    """
    nu = np.asarray(nu, dtype=float)
    if np.any(nu <= -1.0):
        return -np.inf
    totals = prob.power.sum(axis=1)
    return float(np.sum(nu * (totals / (1.0 + nu) - 1.0 / prob.m)))


def _distance_multipliers(x: np.ndarray, r: np.ndarray, hess_diag: np.ndarray, t: float, m: int, k: int) -> np.ndarray:
    # Per-antenna ν that best balances ∇‖√x − √r‖² in the barrier metric
    g = to_matrix(1.0 - np.sqrt(r / x), m, k)
    w = 1.0 / to_matrix(hess_diag / t, m, k)
    return -np.sum(g * w, axis=1) / np.sum(w, axis=1)


def certified_gap(prob: MpuProblem, x: np.ndarray, nu_newton: np.ndarray, hess_diag: np.ndarray, t: float) -> float:
    """‖√x − √r‖² minus the best of two dual bounds; an upper bound on the suboptimality of x"""
    m, k = prob.m, prob.k
    bound = max(
        mpu_dual_bound(prob, nu_newton / t),
        mpu_dual_bound(prob, _distance_multipliers(x, prob.r, hess_diag, t, m, k)),
    )
    return mpu_distance(x, prob.r) - bound


def antenna_step_lengths(
    x: np.ndarray, dx: np.ndarray, r: np.ndarray, t: float, decrement_sq: np.ndarray, m: int, k: int,
) -> np.ndarray:
    """
    Armijo step length per antenna block.

    The equalities couple only the K powers of one antenna, so each block keeps
    its own fraction-to-boundary cap and backtracking. Merit changes use
    √z − √x = (z − x)/(√z + √x) to stay accurate at large t.
    """
    xm = to_matrix(x, m, k)
    dm = to_matrix(dx, m, k)
    sqrt_r = np.sqrt(to_matrix(r, m, k))
    with np.errstate(divide='ignore'):
        limits = np.min(np.where(dm < 0.0, -xm / dm, np.inf), axis=1)
    steps = np.minimum(1.0, BOUNDARY_FRACTION * limits)
    active = decrement_sq > 0.0
    accepted = ~active
    for _ in range(MAX_BACKTRACKS):
        dz = steps[:, np.newaxis] * dm
        z = xm + dz
        change = (t * np.sum(dz - 2.0 * sqrt_r * dz / (np.sqrt(z) + np.sqrt(xm)), axis=1)
                  - np.sum(np.log1p(dz / xm), axis=1))
        accepted = accepted | (change <= -LINE_SEARCH_ALPHA * steps * decrement_sq)
        if np.all(accepted):
            break
        steps = np.where(accepted, steps, steps * LINE_SEARCH_BETA)
    return np.where(accepted & active, steps, 0.0)


def feasible_newton_allocate(prob: MpuProblem, max_iterations: int = MPU_MAX_ITERATIONS) -> Tuple[np.ndarray, SolverReport]:
    """
    Solve min ‖√x − √r‖² s.t. Ax = b, x ≥ 0 by a feasible-start barrier method.

    Iterates stay on Ax = b because every Newton step lies in the null space
    of A. report.iterations counts Newton sweeps; the run stops once the
    certified duality gap drops below BARRIER_GAP_TOLERANCE.
    """
    prob.validated()
    m, k, r = prob.m, prob.k, prob.r
    n = m * k
    x = _starting_point(prob)
    report = SolverReport(method="MPU-Opt")

    distance0 = mpu_distance(x, r)
    converged = distance0 <= 1e-15
    if converged:
        report.duality_gap = distance0
    t = initial_barrier_parameter(n, distance0)

    while not converged:
        grad = mpu_barrier_gradient(x, r, t)
        hess = mpu_barrier_hessian_diag(x, r, t)
        dx, nu = structured_newton_step(hess, grad, m, k)
        report.duality_gap = certified_gap(prob, x, nu, hess, t)
        if report.duality_gap < BARRIER_GAP_TOLERANCE:
            converged = True
            break

        decrement_sq = -np.sum(to_matrix(grad, m, k) * to_matrix(dx, m, k), axis=1)
        if np.sum(decrement_sq) / 2.0 >= NEWTON_TOLERANCE:
            if report.iterations >= max_iterations:
                break
            steps = antenna_step_lengths(x, dx, r, t, decrement_sq, m, k)
            if np.any(steps > 0.0):
                x = x + np.tile(steps, k) * dx
                report.iterations += 1
                continue
            logger.debug(f"MPU-Opt: line search stalled at t={t:.3e}")

        report.stages += 1
        report.objective_history.append(mpu_distance(x, r))
        logger.debug(f"MPU-Opt stage {report.stages}: t={t:.3e}, newton={report.iterations}, "
                     f"gap={report.duality_gap:.3e}, distance={report.objective_history[-1]:.10g}")
        if barrier_stage_count_reached(n, t):
            converged = True
            break
        t *= BARRIER_MU

    report.final_objective = mpu_distance(x, r)
    report.equality_residual = float(np.max(np.abs(antenna_sums(x, m, k) - 1.0 / m)))
    report.min_x = float(x.min())
    report.barrier_t = float(t)
    report.converged = bool(converged) and report.equality_residual < 1e-9 and report.min_x >= 0.0
    if not report.converged:
        logger.warning(f"MPU-Opt did not converge: newton={report.iterations}, "
                       f"gap={report.duality_gap:.2e}, residual={report.equality_residual:.2e}")
    return to_matrix(x, m, k), report
