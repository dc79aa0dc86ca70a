"""
Tests for the maximum-power-utilization allocators
"""

import unittest

import numpy as np

from src.channel import generate_channel, apply_csi_error
from src.config import MPU_MAX_ITERATIONS
from src.precoding import zf_spc
from src.allocation import (
    MpuProblem, min_a_threshold, orthogonal_projection_allocate, feasible_newton_allocate,
    mpu_barrier_objective, mpu_barrier_gradient, mpu_barrier_hessian_diag,
    structured_newton_step, dense_newton_step, project_null_space, projection_matrix_dense,
    gram_inverse_exact, gram_inverse_neumann, mpu_dense_reference, mpu_closed_form_optimum,
    mpu_dual_bound,
)
from src.allocation.barrier import objective_history_is_monotone
from src.allocation.mpu import equality_matrix, to_vector, to_matrix, mpu_distance, antenna_sums, antenna_step_lengths
from src.core.errors import DimensionError, DomainError, ParameterError


def _zf_problem(m: int, k: int, seed: int) -> MpuProblem:
    return MpuProblem.from_power(zf_spc(generate_channel(m, k, seed)).power)


def _uniform_problem(m: int, k: int) -> MpuProblem:
    return MpuProblem.from_power(np.full((m, k), 1.0 / (m * k)))


class TestProblem(unittest.TestCase):
    """Test cases for the MPU instance invariants"""

    def test_vectorization_is_column_major(self):
        """r[k*M + m] is the power of user k on antenna m"""
        p = np.arange(6, dtype=float).reshape(3, 2)
        x = to_vector(p)
        self.assertEqual(x[1 * 3 + 2], p[2, 1])
        np.testing.assert_array_equal(to_matrix(x, 3, 2), p)
        np.testing.assert_array_equal(equality_matrix(3, 2) @ x, p.sum(axis=1))

    def test_rejects_bad_instances(self):
        """Negative entries, wrong totals and sizes are rejected"""
        with self.assertRaises(DomainError):
            MpuProblem.from_power(np.array([[0.6, -0.1], [0.3, 0.2]]))
        with self.assertRaises(DomainError):
            MpuProblem.from_power(np.full((2, 2), 0.3))
        with self.assertRaises(DimensionError):
            MpuProblem(r=np.full(5, 0.2), m=2, k=3).validated()


class TestOrthogonalProjection(unittest.TestCase):
    """Test cases for the closed-form projection allocator"""

    def test_threshold_values(self):
        """Non-negativity threshold M²K/(MK−1)"""
        self.assertAlmostEqual(min_a_threshold(1, 2), 2.0, places=12)
        self.assertAlmostEqual(min_a_threshold(128, 16), 128 * 128 * 16 / 2047.0, places=9)
        self.assertAlmostEqual(min_a_threshold(128, 16), 128.0625, delta=1e-4)
        with self.assertRaises(DomainError):
            min_a_threshold(1, 1)

    def test_uniform_is_fixed_point(self):
        """A uniform SPC pattern maps to itself"""
        prob = _uniform_problem(8, 4)
        p, report = orthogonal_projection_allocate(prob)
        np.testing.assert_allclose(p, prob.power, atol=1e-12)
        self.assertEqual(report.iterations, 0)
        self.assertTrue(report.converged)

    def test_feasible(self):
        """Every antenna sits at 1/M with non-negative powers"""
        for m, k, seed in [(8, 3, 2), (64, 8, 5), (128, 16, 1)]:
            p, report = orthogonal_projection_allocate(_zf_problem(m, k, seed))
            np.testing.assert_allclose(p.sum(axis=1), 1.0 / m, atol=1e-12)
            self.assertGreaterEqual(p.min(), 0.0)
            self.assertLess(report.equality_residual, 1e-12)
        print("✅ Projection feasibility test passed")

    def test_larger_parameter_still_feasible(self):
        """Any a above the threshold keeps the equalities"""
        prob = _zf_problem(16, 4, 3)
        p, _ = orthogonal_projection_allocate(prob, a=10.0 * min_a_threshold(16, 4))
        np.testing.assert_allclose(p.sum(axis=1), 1.0 / 16, atol=1e-12)
        self.assertGreaterEqual(p.min(), 0.0)

    def test_parameter_below_threshold(self):
        """a below the threshold is a parameter error"""
        prob = _zf_problem(8, 3, 2)
        with self.assertRaises(ParameterError):
            orthogonal_projection_allocate(prob, a=0.5 * min_a_threshold(8, 3))

    def test_projection_idempotent(self):
        """Structured and dense projectors are idempotent and agree"""
        rng = np.random.default_rng(0)
        m, k = 5, 3
        z = rng.normal(size=m * k + 1)
        once = project_null_space(z, m, k)
        np.testing.assert_allclose(project_null_space(once, m, k), once, atol=1e-12)
        dense = projection_matrix_dense(m, k)
        np.testing.assert_allclose(dense @ dense, dense, atol=1e-12)
        np.testing.assert_allclose(dense @ z, once, atol=1e-12)

    def test_gram_inverse(self):
        """Exact inverse and the Neumann approximation error"""
        for m, k in [(4, 2), (64, 8), (128, 16)]:
            gram = k * np.eye(m) + np.ones((m, m)) / m ** 2
            np.testing.assert_allclose(gram @ gram_inverse_exact(m, k), np.eye(m), atol=1e-12)
            difference = np.abs(gram_inverse_exact(m, k) - gram_inverse_neumann(m, k))
            expected = 1.0 / (m * m * k * k * (m * k + 1))
            np.testing.assert_allclose(difference, expected, rtol=1e-6, atol=1e-18)
            if m >= 64:
                self.assertLessEqual(difference.max(), 2.0 / (m * m * k * k))


class TestBarrierPieces(unittest.TestCase):
    """Test cases for the barrier objective and the Newton step"""

    def setUp(self):
        """Set up test fixtures"""
        rng = np.random.default_rng(4)
        self.r = rng.uniform(0.05, 0.5, size=6)
        self.r /= self.r.sum()
        self.x = rng.uniform(0.1, 1.0, size=6)
        self.t = 3.0

    def test_objective_at_r(self):
        """At x = r only the log term remains"""
        self.assertAlmostEqual(
            mpu_barrier_objective(self.r, self.r, 5.0), float(-np.sum(np.log(self.r))), places=12,
        )

    def test_gradient_matches_finite_differences(self):
        """Analytic gradient against central differences"""
        grad = mpu_barrier_gradient(self.x, self.r, self.t)
        for i in range(self.x.size):
            h = 1e-6
            e = np.zeros_like(self.x)
            e[i] = h
            fd = (mpu_barrier_objective(self.x + e, self.r, self.t) - mpu_barrier_objective(self.x - e, self.r, self.t)) / (2 * h)
            self.assertLess(abs(fd - grad[i]), 1e-6 * max(1.0, abs(grad[i])))

    def test_hessian_matches_finite_differences(self):
        """Diagonal Hessian against differences of the gradient"""
        hess = mpu_barrier_hessian_diag(self.x, self.r, self.t)
        for i in range(self.x.size):
            h = 1e-6
            e = np.zeros_like(self.x)
            e[i] = h
            fd = (mpu_barrier_gradient(self.x + e, self.r, self.t)[i] - mpu_barrier_gradient(self.x - e, self.r, self.t)[i]) / (2 * h)
            self.assertLess(abs(fd - hess[i]), 1e-5 * max(1.0, abs(hess[i])))

    def test_nonpositive_point(self):
        """The barrier is undefined at x <= 0"""
        x = self.x.copy()
        x[0] = 0.0
        with self.assertRaises(DomainError):
            mpu_barrier_objective(x, self.r, 1.0)
        with self.assertRaises(DomainError):
            mpu_barrier_gradient(x, self.r, 1.0)

    def test_structured_step_matches_dense(self):
        """O(MK) step equals the dense KKT solution"""
        for m, k, seed in [(8, 3, 1), (16, 4, 2)]:
            prob = _zf_problem(m, k, seed)
            x = to_vector(mpu_closed_form_optimum(prob)) * 0.5 + 0.5 / (m * m * k)
            grad = mpu_barrier_gradient(x, prob.r, 10.0)
            hess = mpu_barrier_hessian_diag(x, prob.r, 10.0)
            fast, _ = structured_newton_step(hess, grad, m, k)
            dense = dense_newton_step(hess, grad, equality_matrix(m, k))
            self.assertLess(np.max(np.abs(fast - dense)), 1e-8 * max(1.0, np.max(np.abs(dense))))
            np.testing.assert_allclose(equality_matrix(m, k) @ fast, 0.0, atol=1e-12)

    def test_antenna_step_lengths(self):
        """Per-antenna steps keep every power positive and every antenna at 1/M"""
        prob = _zf_problem(16, 4, 3)
        p_proj, _ = orthogonal_projection_allocate(prob)
        x = 0.9 * to_vector(p_proj) + 0.1 / 64
        t = 1e4
        grad = mpu_barrier_gradient(x, prob.r, t)
        hess = mpu_barrier_hessian_diag(x, prob.r, t)
        dx, _ = structured_newton_step(hess, grad, 16, 4)
        decrement_sq = -np.sum(to_matrix(grad, 16, 4) * to_matrix(dx, 16, 4), axis=1)
        steps = antenna_step_lengths(x, dx, prob.r, t, decrement_sq, 16, 4)
        self.assertEqual(steps.shape, (16,))
        self.assertTrue(np.all((steps >= 0.0) & (steps <= 1.0)))
        self.assertTrue(np.any(steps > 0.0))
        z = x + np.tile(steps, 4) * dx
        self.assertTrue(np.all(z > 0.0))
        np.testing.assert_allclose(antenna_sums(z, 16, 4), 1.0 / 16, atol=1e-12)
        before = mpu_barrier_objective(x, prob.r, t)
        self.assertLess(mpu_barrier_objective(z, prob.r, t), before)


class TestDualBound(unittest.TestCase):
    """Test cases for the MPU duality-gap certificate"""

    def test_bound_below_optimum(self):
        """Any multiplier above −1 gives a lower bound on the optimum"""
        prob = _zf_problem(16, 4, 8)
        optimum = mpu_distance(to_vector(mpu_closed_form_optimum(prob)), prob.r)
        rng = np.random.default_rng(3)
        for _ in range(20):
            nu = rng.uniform(-0.9, 3.0, size=16)
            self.assertLessEqual(mpu_dual_bound(prob, nu), optimum + 1e-15)
        self.assertEqual(mpu_dual_bound(prob, np.full(16, -1.0)), -np.inf)

    def test_bound_tight_at_dual_optimum(self):
        """ν_m = √(M·s_m) − 1 closes the gap"""
        prob = _zf_problem(16, 4, 8)
        totals = prob.power.sum(axis=1)
        nu = np.sqrt(16 * totals) - 1.0
        optimum = mpu_distance(to_vector(mpu_closed_form_optimum(prob)), prob.r)
        self.assertAlmostEqual(mpu_dual_bound(prob, nu), optimum, places=14)


class TestFeasibleNewton(unittest.TestCase):
    """Test cases for the barrier Newton allocator"""

    def test_uniform_input(self):
        """Uniform SPC pattern is already optimal"""
        prob = _uniform_problem(8, 4)
        p, report = feasible_newton_allocate(prob)
        np.testing.assert_allclose(p, prob.power, atol=1e-12)
        self.assertLessEqual(report.iterations, 2)
        self.assertTrue(report.converged)

    def test_matches_closed_form(self):
        """Barrier solution agrees with the per-antenna closed form"""
        for m, k, seed in [(8, 3, 3), (6, 2, 4), (32, 4, 5)]:
            prob = _zf_problem(m, k, seed)
            p, report = feasible_newton_allocate(prob)
            self.assertTrue(report.converged)
            optimum = mpu_closed_form_optimum(prob)
            np.testing.assert_allclose(p, optimum, atol=1e-5)
            self.assertLess(report.final_objective - mpu_distance(to_vector(optimum), prob.r), 1e-8)
        print("✅ MPU-Opt closed-form test passed")

    def test_matches_dense_reference(self):
        """Structured solver agrees with the generic dense barrier solver"""
        for m, k, seed in [(8, 3, 6), (6, 2, 7)]:
            prob = _zf_problem(m, k, seed)
            p, _ = feasible_newton_allocate(prob)
            p_ref, ref_report = mpu_dense_reference(prob)
            self.assertTrue(ref_report.converged)
            np.testing.assert_allclose(p, p_ref, atol=1e-5)

    def test_feasible_and_better_than_projection(self):
        """Full power on every antenna and no worse than the projection"""
        for seed in range(5):
            prob = _zf_problem(32, 4, seed)
            p, report = feasible_newton_allocate(prob)
            p_proj, proj_report = orthogonal_projection_allocate(prob)
            np.testing.assert_allclose(p.sum(axis=1), 1.0 / 32, atol=1e-9)
            self.assertGreaterEqual(p.min(), 0.0)
            self.assertLessEqual(report.final_objective, proj_report.final_objective + 1e-9)
            self.assertAlmostEqual(report.final_objective, mpu_distance(to_vector(p), prob.r), places=12)

    def test_history_monotone(self):
        """Objectives at successive centered points never increase"""
        _, report = feasible_newton_allocate(_zf_problem(64, 8, 9))
        self.assertTrue(objective_history_is_monotone(report))
        self.assertEqual(len(report.objective_history), report.stages)
        self.assertLess(report.duality_gap, 1e-8)

    def test_newton_steps_large_system(self):
        """Newton sweeps stay under the solver cap for M=128, K=16"""
        for seed in range(20):
            _, report = feasible_newton_allocate(_zf_problem(128, 16, seed))
            self.assertTrue(report.converged)
            self.assertGreater(report.iterations, 0)
            self.assertLessEqual(report.iterations, MPU_MAX_ITERATIONS)
            self.assertLess(report.duality_gap, 1e-8)

    def test_converges_with_imperfect_csi(self):
        """Measured-CSI instances at beta=0.5 converge to the closed form"""
        for seed in range(30):
            h = apply_csi_error(generate_channel(128, 16, seed), 0.5, 1000 + seed).h_measured
            prob = MpuProblem.from_power(zf_spc(h).power)
            p, report = feasible_newton_allocate(prob)
            self.assertTrue(report.converged, f"seed {seed}: gap {report.duality_gap:.3e}")
            self.assertLess(np.max(np.abs(p - mpu_closed_form_optimum(prob))), 1e-5)
        print("✅ Imperfect-CSI convergence test passed")

    def test_iteration_cap(self):
        """Hitting the stage cap reports non-convergence"""
        p, report = feasible_newton_allocate(_zf_problem(16, 4, 1), max_iterations=1)
        self.assertFalse(report.converged)
        self.assertEqual(report.iterations, 1)
        np.testing.assert_allclose(p.sum(axis=1), 1.0 / 16, atol=1e-9)


if __name__ == "__main__":
    unittest.main(verbosity=2)
