"""
Tests for the SPC precoders, the polar decomposition and CB under PAPC
"""

import math
import unittest

import numpy as np

from src.channel import generate_channel
from src.precoding import (
    zf_spc, cb_spc, decompose, compose, gram_inverse, power_matrix,
    cb_papc_precoder, amplitude_mean, spc_papc_signal_ratio,
)
from src.core.errors import DimensionError, DomainError, SingularChannelError, DegenerateChannelError


class TestZeroForcing(unittest.TestCase):
    """Test cases for ZF under the sum-power constraint"""

    def test_single_user(self):
        """K=1, M=2 with h = [1, 1]"""
        pre = zf_spc(np.array([[1.0, 1.0]]))
        self.assertAlmostEqual(pre.phi, 2.0, places=12)
        np.testing.assert_allclose(pre.w[:, 0], [math.sqrt(0.5), math.sqrt(0.5)], atol=1e-12)
        self.assertAlmostEqual(float(pre.power.sum()), 1.0, places=12)

    def test_zero_forcing_identity(self):
        """H·W equals √φ·I"""
        h = generate_channel(8, 3, 5)
        pre = zf_spc(h)
        residual = np.linalg.norm(h @ pre.w - math.sqrt(pre.phi) * np.eye(3)) / math.sqrt(pre.phi)
        self.assertLess(residual, 1e-8)
        print("✅ ZF identity test passed")

    def test_total_power_and_alpha(self):
        """Total power 1 and α_k are the column sums"""
        pre = zf_spc(generate_channel(64, 8, 2))
        self.assertAlmostEqual(float(power_matrix(pre).sum()), 1.0, places=10)
        np.testing.assert_allclose(pre.alpha, power_matrix(pre).sum(axis=0), rtol=1e-12)
        self.assertEqual((pre.m, pre.k), (64, 8))

    def test_phi_large_system(self):
        """φ is close to (M−K)/K for M=128, K=16"""
        pre = zf_spc(generate_channel(128, 16, 0))
        self.assertLess(abs(pre.phi - 7.0) / 7.0, 0.15)

    def test_gram_inverse_quality(self):
        """Cholesky inverse of the Gram matrix has a small residual"""
        h = generate_channel(128, 16, 4)
        inverse = gram_inverse(h)
        self.assertLess(np.linalg.norm(h @ h.conj().T @ inverse - np.eye(16)), 1e-10)

    def test_singular_channel(self):
        """Linearly dependent users are rejected"""
        with self.assertRaises(SingularChannelError):
            zf_spc(np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_too_many_users(self):
        """ZF needs K <= M"""
        with self.assertRaises(DimensionError):
            zf_spc(np.ones((3, 2)))


class TestConjugateBeamforming(unittest.TestCase):
    """Test cases for CB under the sum-power constraint"""

    def test_single_user(self):
        """K=1, M=4 with h all ones"""
        pre = cb_spc(np.ones((1, 4)))
        self.assertAlmostEqual(pre.phi, 0.25, places=12)
        np.testing.assert_allclose(pre.w[:, 0], 0.5, atol=1e-12)

    def test_alpha_sums_to_one(self):
        """User powers sum to 1"""
        pre = cb_spc(generate_channel(32, 6, 8))
        self.assertAlmostEqual(float(pre.alpha.sum()), 1.0, places=10)

    def test_alpha_near_uniform(self):
        """Each α_k is close to 1/K for a large array"""
        pre = cb_spc(generate_channel(1024, 16, 3))
        self.assertTrue(np.all(np.abs(pre.alpha * 16 - 1.0) < 0.15))

    def test_zero_row(self):
        """An all-zero user row is degenerate"""
        h = generate_channel(8, 2, 1)
        h[0] = 0.0
        with self.assertRaises(DegenerateChannelError):
            cb_spc(h)


class TestDecomposition(unittest.TestCase):
    """Test cases for the magnitude/phase split"""

    def test_examples(self):
        """Known decompositions"""
        xi, theta = decompose(np.array([[-1.0 + 0j, 0.0, 3.0 + 4.0j]]))
        np.testing.assert_allclose(xi, [[1.0, 0.0, 5.0]], atol=1e-15)
        np.testing.assert_allclose(theta, [[math.pi, 0.0, math.atan2(4.0, 3.0)]], atol=1e-15)

    def test_phase_range(self):
        """Phases lie in (−π, π]"""
        _, theta = decompose(generate_channel(16, 4, 6))
        self.assertTrue(np.all(theta > -math.pi))
        self.assertTrue(np.all(theta <= math.pi))

    def test_compose_inverts_decompose(self):
        """compose(ξ², θ) rebuilds the matrix"""
        w = generate_channel(16, 4, 6)
        xi, theta = decompose(w)
        np.testing.assert_allclose(compose(xi ** 2, theta), w, atol=1e-12)
        np.testing.assert_array_equal(compose(np.zeros((2, 2)), np.zeros((2, 2))), np.zeros((2, 2)))

    def test_compose_negative_power(self):
        """Tiny negative powers are clamped; larger ones are errors"""
        w = compose(np.array([[-1e-13]]), np.array([[0.3]]))
        self.assertEqual(abs(w[0, 0]), 0.0)
        with self.assertRaises(DomainError):
            compose(np.array([[-1e-6]]), np.array([[0.0]]))
        with self.assertRaises(DimensionError):
            compose(np.ones((2, 2)), np.ones((2, 3)))

    def test_spc_phase_is_closest(self):
        """For fixed magnitudes, the SPC phases minimize the distance to W"""
        rng = np.random.default_rng(12)
        w = generate_channel(8, 3, 12)
        _, theta = decompose(w)
        magnitudes = rng.uniform(0.0, 2.0, size=w.shape)
        best = np.linalg.norm(w - compose(magnitudes ** 2, theta)) ** 2
        for _ in range(100):
            other = theta + rng.normal(scale=0.5, size=w.shape)
            self.assertLessEqual(best, np.linalg.norm(w - compose(magnitudes ** 2, other)) ** 2 + 1e-12)


class TestConjugatePapc(unittest.TestCase):
    """Test cases for CB under per-antenna constraints"""

    def test_single_user(self):
        """Real positive channel gives a flat precoder"""
        pre = cb_papc_precoder(np.full((1, 4), 2.0), np.array([1.0]))
        np.testing.assert_allclose(pre.w[:, 0], 0.5, atol=1e-12)

    def test_per_antenna_power(self):
        """Every antenna transmits exactly 1/M"""
        h = generate_channel(32, 5, 9)
        alpha = cb_spc(h).alpha
        pre = cb_papc_precoder(h, alpha)
        np.testing.assert_allclose(np.sum(np.abs(pre.w) ** 2, axis=1), 1.0 / 32, atol=1e-12)
        np.testing.assert_allclose(np.abs(pre.w), np.sqrt(alpha / 32)[np.newaxis, :].repeat(32, axis=0), atol=1e-12)

    def test_coherent_combining(self):
        """h_kᵀw_k is real and positive"""
        h = generate_channel(16, 3, 2)
        pre = cb_papc_precoder(h, np.full(3, 1.0 / 3))
        signal = np.diag(h @ pre.w)
        np.testing.assert_allclose(signal.imag, 0.0, atol=1e-12)
        self.assertTrue(np.all(signal.real > 0.0))

    def test_alpha_must_sum_to_one(self):
        """User powers outside the simplex are rejected"""
        h = generate_channel(8, 2, 0)
        with self.assertRaises(DomainError):
            cb_papc_precoder(h, np.array([0.5, 0.6]))
        with self.assertRaises(DomainError):
            cb_papc_precoder(h, np.array([1.2, -0.2]))
        with self.assertRaises(DimensionError):
            cb_papc_precoder(h, np.array([1.0]))

    def test_amplitude_mean(self):
        """Mean entry magnitude tends to √π/2"""
        h = generate_channel(256, 200, 21)
        self.assertLess(abs(float(np.mean(amplitude_mean(h))) / (math.sqrt(math.pi) / 2) - 1.0), 0.02)

    def test_signal_ratio(self):
        """SPC to PAPC signal ratio tends to 4/π"""
        h = generate_channel(256, 200, 22)
        ratio = float(np.mean(spc_papc_signal_ratio(h)))
        self.assertLess(abs(ratio / (4.0 / math.pi) - 1.0), 0.03)
        print("✅ CB 4/π ratio test passed")


if __name__ == "__main__":
    unittest.main(verbosity=2)
