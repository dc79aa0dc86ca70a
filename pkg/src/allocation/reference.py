"""
Reference solvers
A structure-free dense barrier method used to check the fast allocators,
and the closed-form optimum of the maximum-power-utilization problem
"""

import logging
from typing import Callable, Optional, Tuple

import numpy as np

from .barrier import SolverReport
from .mmi import MmiProblem, linear_scaling_allocate
from .mpu import MpuProblem, equality_matrix, to_matrix

logger = logging.getLogger(__name__)


def dense_barrier_solve(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    hessian: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    a_eq: Optional[np.ndarray],
    b_eq: Optional[np.ndarray],
    g_ineq: np.ndarray,
    h_ineq: np.ndarray,
    t0: float = 1.0,
    mu: float = 10.0,
    gap_tolerance: float = 1e-11,
    max_stages: int = 100,
    max_newton: int = 200,
) -> Tuple[np.ndarray, SolverReport]:
    """
    Generic log-barrier method for min f(x) s.t. a_eq·x = b_eq, g_ineq·x < h_ineq.

    x0 must be strictly feasible. Newton steps come from the full dense KKT
    matrix; no problem structure is used.
    """
    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    a_eq = np.zeros((0, n)) if a_eq is None else np.asarray(a_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    p = a_eq.shape[0]
    n_ineq = g_ineq.shape[0]
    report = SolverReport(method="dense-reference")

    def merit(z, t):
        s = h_ineq - g_ineq @ z
        if np.any(s <= 0.0):
            return np.inf
        return t * objective(z) - np.sum(np.log(s))

    t = t0
    while report.stages < max_stages:
        for _ in range(max_newton):
            s = h_ineq - g_ineq @ x
            grad = t * gradient(x) + g_ineq.T @ (1.0 / s)
            hess = t * hessian(x) + g_ineq.T @ np.diag(1.0 / s ** 2) @ g_ineq
            kkt = np.block([[hess, a_eq.T], [a_eq, np.zeros((p, p))]])
            dx = np.linalg.solve(kkt, np.concatenate([-grad, np.zeros(p)]))[:n]
            decrement_sq = float(-grad @ dx)
            if decrement_sq / 2.0 < 1e-12:
                break
            step = 1.0
            current = merit(x, t)
            # Allow for rounding in the merit value once t is large
            allowance = 1e-13 * abs(current)
            while merit(x + step * dx, t) > current - 0.25 * step * decrement_sq + allowance:
                step *= 0.5
                if step < 1e-12:
                    break
            if step < 1e-12:
                break
            x = x + step * dx
            report.iterations += 1
        report.stages += 1
        if n_ineq / t < gap_tolerance:
            report.converged = True
            break
        t *= mu

    report.final_objective = float(objective(x))
    report.equality_residual = float(np.max(np.abs(a_eq @ x - b_eq))) if p else 0.0
    report.min_x = float(np.min(x))
    report.barrier_t = t
    return x, report


def mpu_dense_reference(prob: MpuProblem) -> Tuple[np.ndarray, SolverReport]:
    """Solve the MPU problem with the generic dense solver from the uniform point"""
    n = prob.m * prob.k
    r = prob.r
    x, report = dense_barrier_solve(
        objective=lambda x: float(np.sum((np.sqrt(x) - np.sqrt(r)) ** 2)),
        gradient=lambda x: 1.0 - np.sqrt(r / x),
        hessian=lambda x: np.diag(0.5 * np.sqrt(r) * x ** -1.5),
        x0=np.full(n, 1.0 / n),
        a_eq=equality_matrix(prob.m, prob.k),
        b_eq=np.full(prob.m, 1.0 / prob.m),
        g_ineq=-np.eye(n),
        h_ineq=np.zeros(n),
    )
    return to_matrix(x, prob.m, prob.k), report


def mmi_dense_reference(prob: MmiProblem) -> Tuple[np.ndarray, SolverReport]:
    """Solve the MMI problem over the full (M+K)-row polytope with the generic solver"""
    k = prob.k
    sqrt_alpha = np.sqrt(prob.alpha)
    _, x_ls = linear_scaling_allocate(prob)
    return dense_barrier_solve(
        objective=lambda x: float(np.sum((np.sqrt(x) - sqrt_alpha) ** 2)),
        gradient=lambda x: 1.0 - sqrt_alpha / np.sqrt(x),
        hessian=lambda x: np.diag(0.5 * sqrt_alpha * x ** -1.5),
        x0=0.5 * x_ls,
        a_eq=None,
        b_eq=None,
        g_ineq=np.vstack([prob.a_mmi, -np.eye(k)]),
        h_ineq=np.concatenate([prob.cap_vector, np.zeros(k)]),
    )


def mpu_closed_form_optimum(prob: MpuProblem) -> np.ndarray:
    """
    Exact MPU optimum x_mk = r_mk / (M·Σ_k r_mk).

    The equalities fix each antenna's total, so the problem splits per antenna
    into max Σ_k √(x_mk·r_mk) with Σ_k x_mk = 1/M, solved by Cauchy–Schwarz.
    """
    p = prob.power
    totals = p.sum(axis=1, keepdims=True)
    with np.errstate(invalid='ignore', divide='ignore'):
        optimum = np.where(totals > 0.0, p / (prob.m * totals), 1.0 / (prob.m * prob.k))
    return optimum
