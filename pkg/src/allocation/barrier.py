"""
Log-barrier machinery shared by the PAPC allocators
Solver report, backtracking line search and a K-dimensional inequality-constrained
barrier method with dense Newton steps
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from ..config import (
    BARRIER_MU, BARRIER_GAP_TOLERANCE, NEWTON_TOLERANCE,
    LINE_SEARCH_ALPHA, LINE_SEARCH_BETA,
)

logger = logging.getLogger(__name__)

# Floor applied to slacks inside log and sqrt terms
SLACK_FLOOR = 1e-14
# Fraction of the distance to the boundary a step may cover
BOUNDARY_FRACTION = 0.99
MAX_BACKTRACKS = 60
# Rows whose slack is below cutoff·b keep their multiplier in the dual bound
ACTIVE_CUTOFFS = (None, 1e-1, 1e-2, 1e-3)


@dataclass
class SolverReport:
    """Outcome of an allocator run; iterations counts Newton steps"""
    iterations: int = 0
    final_objective: float = float('nan')
    equality_residual: float = 0.0
    min_x: float = float('nan')
    converged: bool = False
    stages: int = 0
    barrier_t: float = 0.0
    duality_gap: float = float('inf')
    objective_history: List[float] = field(default_factory=list)
    stationarity: float = float('nan')
    method: str = ""


def max_step_to_boundary(values: np.ndarray, deltas: np.ndarray) -> float:
    """Largest step in (0, 1] keeping values + s·deltas strictly positive"""
    shrinking = deltas < 0.0
    if not np.any(shrinking):
        return 1.0
    limit = np.min(-values[shrinking] / deltas[shrinking])
    return float(min(1.0, BOUNDARY_FRACTION * limit))


def backtracking_line_search(
    merit_change: Callable[[float], float],
    slope: float,
    step_max: float = 1.0,
    alpha: float = LINE_SEARCH_ALPHA,
    beta: float = LINE_SEARCH_BETA,
) -> float:
    """
    Armijo backtracking starting from the feasibility-capped step.

    merit_change(s) returns merit(x + s·dx) − merit(x); 0.0 means no step
    decreases the merit at working precision.
    """
    step = step_max
    for _ in range(MAX_BACKTRACKS):
        change = merit_change(step)
        if np.isfinite(change) and change <= alpha * step * slope:
            return step
        step *= beta
    return 0.0


def barrier_stage_count_reached(n_ineq: int, t: float) -> bool:
    """True once the duality-gap bound n/t is below tolerance"""
    return n_ineq / t < BARRIER_GAP_TOLERANCE


def initial_barrier_parameter(n_ineq: int, gap_bound: float) -> float:
    """t0 = n / (suboptimality bound of the starting point)"""
    return n_ineq / max(gap_bound, 1e-300)


def _solve_spd(hessian: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return cho_solve(cho_factor(hessian, lower=True), rhs)
    except LinAlgError:
        logger.debug("Hessian not positive definite, falling back to least squares")
        return np.linalg.lstsq(hessian, rhs, rcond=None)[0]


def best_dual_bound(
    dual_bound: Callable[[np.ndarray], float],
    slacks: np.ndarray,
    b_ineq: np.ndarray,
    t: float,
) -> float:
    """
    Largest of the dual bounds g(λ) over a few multiplier choices.

    λ = 1/(t·s) is the barrier estimate; dropping the rows with large slack
    removes their 1/t share of the gap. Every choice is λ >= 0, so each value
    is a valid lower bound on the optimum.
    """
    lam = 1.0 / (t * slacks)
    best = -np.inf
    for cutoff in ACTIVE_CUTOFFS:
        trial = lam if cutoff is None else np.where(slacks <= cutoff * b_ineq, lam, 0.0)
        value = dual_bound(trial)
        if np.isfinite(value):
            best = max(best, value)
    return best


def solve_inequality_barrier(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    hessian: Callable[[np.ndarray], np.ndarray],
    a_ineq: np.ndarray,
    b_ineq: np.ndarray,
    x0: np.ndarray,
    max_iterations: int,
    label: str = "barrier",
    mu: float = BARRIER_MU,
    objective_change: Optional[Callable[[np.ndarray, np.ndarray], float]] = None,
    dual_bound: Optional[Callable[[np.ndarray], float]] = None,
) -> Tuple[np.ndarray, SolverReport]:
    """
    Minimize a convex objective subject to a_ineq·x <= b_ineq and x >= 0.

    Starts from a strictly feasible x0 and takes at most max_iterations Newton
    steps. objective_change(x, z) = f(z) − f(x) evaluated without cancellation
    keeps the line search meaningful once t is large. dual_bound(λ) is the
    Lagrange dual g(λ) = inf_{x >= 0} f(x) + λᵀ(a_ineq·x − b_ineq); when given,
    it sets t0 from f(x0) − g(0) and certifies the gap f(x) − g(λ) at every
    centered point. Without it, t0 comes from a first-order bound over the box
    x_k <= min_m b_m/a_mk and the stopping rule is n/t.
    """
    a_ineq = np.asarray(a_ineq, dtype=float)
    b_ineq = np.asarray(b_ineq, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    n_ineq = a_ineq.shape[0] + x.size
    report = SolverReport(method=label)
    change = objective_change or (lambda u, z: objective(z) - objective(u))

    def slacks(z: np.ndarray) -> np.ndarray:
        return b_ineq - a_ineq @ z

    def certified_gap(z: np.ndarray, t_now: float) -> float:
        if dual_bound is None:
            return np.inf
        return objective(z) - best_dual_bound(dual_bound, slacks(z), b_ineq, t_now)

    gap_bound = np.inf
    if dual_bound is not None:
        gap_bound = objective(x) - dual_bound(np.zeros(a_ineq.shape[0]))
    if not np.isfinite(gap_bound):
        with np.errstate(divide='ignore', invalid='ignore'):
            box = np.min(np.where(a_ineq > 0.0, b_ineq[:, np.newaxis] / a_ineq, np.inf), axis=0)
        box = np.where(np.isfinite(box), box, np.max(x) * 10.0)
        gap_bound = float(np.sum(np.abs(gradient(x)) * box))
    t = initial_barrier_parameter(n_ineq, gap_bound)

    converged = gap_bound <= BARRIER_GAP_TOLERANCE
    while not converged:
        s = slacks(x)
        inv_s = 1.0 / s
        grad = t * gradient(x) + a_ineq.T @ inv_s - 1.0 / x
        hess = t * hessian(x) + (a_ineq.T * inv_s ** 2) @ a_ineq + np.diag(1.0 / x ** 2)
        dx = -_solve_spd(hess, grad)
        decrement_sq = float(-grad @ dx)
        centered = decrement_sq / 2.0 < NEWTON_TOLERANCE

        if not centered:
            if report.iterations >= max_iterations:
                break
            ds = -(a_ineq @ dx)
            step_max = min(max_step_to_boundary(x, dx), max_step_to_boundary(s, ds))

            def merit_change(step: float) -> float:
                z = x + step * dx
                if np.any(z <= 0.0) or np.any(s + step * ds <= 0.0):
                    return np.inf
                return (t * change(x, z)
                        - np.sum(np.log1p(step * ds / s))
                        - np.sum(np.log1p(step * dx / x)))

            step = backtracking_line_search(merit_change, -decrement_sq, step_max)
            if step > 0.0:
                x = x + step * dx
                report.iterations += 1
                continue
            # No decrease left at working precision: x is as centered as it gets
            logger.debug(f"{label}: line search stalled at t={t:.3e}, λ²/2={decrement_sq / 2.0:.3e}")

        report.stages += 1
        report.objective_history.append(float(objective(x)))
        report.duality_gap = min(certified_gap(x, t), n_ineq / t)
        logger.debug(f"{label}: stage {report.stages}, t={t:.3e}, newton={report.iterations}, "
                     f"gap={report.duality_gap:.3e}, objective={report.objective_history[-1]:.10g}")
        if report.duality_gap < BARRIER_GAP_TOLERANCE:
            converged = True
            break
        t *= mu

    if not converged:
        # Off the central path only the dual bound certifies the point
        report.duality_gap = certified_gap(x, t)
        converged = report.duality_gap < BARRIER_GAP_TOLERANCE

    s = slacks(x)
    lam = 1.0 / (t * s)
    nu = 1.0 / (t * x)
    report.stationarity = float(np.max(np.abs(gradient(x) + a_ineq.T @ lam - nu)))
    report.final_objective = float(objective(x))
    report.min_x = float(np.min(x))
    report.equality_residual = 0.0
    report.barrier_t = float(t)
    report.converged = bool(converged)
    if not converged:
        logger.warning(f"{label}: no convergence after {report.iterations} Newton steps")
    return x, report


def objective_history_is_monotone(report: SolverReport, tolerance: float = 1e-10) -> bool:
    """Check that the objectives at successive centered points never increase"""
    history = np.asarray(report.objective_history)
    return bool(np.all(np.diff(history) <= tolerance * max(1.0, np.max(np.abs(history), initial=0.0))))
