"""
Power allocation under per-antenna power constraints
"""

from .barrier import SolverReport, solve_inequality_barrier, backtracking_line_search
from .mpu import (
    MpuProblem, min_a_threshold, orthogonal_projection_allocate, feasible_newton_allocate,
    mpu_barrier_objective, mpu_barrier_gradient, mpu_barrier_hessian_diag,
    structured_newton_step, dense_newton_step, project_null_space, projection_matrix_dense,
    gram_inverse_exact, gram_inverse_neumann, mpu_dual_bound,
)
from .mmi import (
    MmiProblem, build_mmi_problem, linear_scaling_allocate, mmi_newton_allocate,
    waterfilling_allocate, mmi_power_matrix, mmi_precoder, zf_effective_gains,
    mmi_dual_bound, waterfilling_dual_bound,
)
from .reference import dense_barrier_solve, mpu_dense_reference, mmi_dense_reference, mpu_closed_form_optimum

__all__ = [
    'SolverReport', 'solve_inequality_barrier', 'backtracking_line_search',
    'MpuProblem', 'min_a_threshold', 'orthogonal_projection_allocate', 'feasible_newton_allocate',
    'mpu_barrier_objective', 'mpu_barrier_gradient', 'mpu_barrier_hessian_diag',
    'structured_newton_step', 'dense_newton_step', 'project_null_space', 'projection_matrix_dense',
    'gram_inverse_exact', 'gram_inverse_neumann', 'mpu_dual_bound',
    'MmiProblem', 'build_mmi_problem', 'linear_scaling_allocate', 'mmi_newton_allocate',
    'waterfilling_allocate', 'mmi_power_matrix', 'mmi_precoder', 'zf_effective_gains',
    'mmi_dual_bound', 'waterfilling_dual_bound',
    'dense_barrier_solve', 'mpu_dense_reference', 'mmi_dense_reference', 'mpu_closed_form_optimum',
]
