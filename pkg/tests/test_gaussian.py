import math

import numpy as np
import pytest

from paim.gaussian import (
    LOG_TWO_PI,
    NotPositiveDefinite,
    cholesky,
    log_gaussian_pdf,
    log_gaussian_pdf_batch,
    regularize,
    sample_gaussian,
)


class TestRegularize:
    def test_zero_scatter(self):
        out = regularize(np.zeros((2, 2)), 0.4)
        assert np.array_equal(out, np.diag([0.4, 0.4]))

    def test_diagonal(self):
        out = regularize(np.diag([1.0, 2.0]), 0.4)
        assert np.array_equal(out, np.diag([1.4, 2.4]))

    def test_off_diagonal_untouched(self):
        out = regularize(np.array([[2.0, 1.0], [1.0, 2.0]]), 0.5)
        assert np.array_equal(out, np.array([[2.5, 1.0], [1.0, 2.5]]))

    def test_rejects_asymmetry(self):
        bad = np.array([[1.0, 1e-6], [0.0, 1.0]])
        with pytest.raises(ValueError, match="asymmetric"):
            regularize(bad, 0.1)

    def test_rejects_nonpositive_epsilon(self):
        with pytest.raises(ValueError):
            regularize(np.eye(2), 0.0)


class TestCholesky:
    def test_identity(self):
        f = cholesky(np.eye(2))
        assert np.array_equal(f.lower, np.eye(2))
        assert f.log_det_half == 0.0

    def test_diagonal(self):
        f = cholesky(np.diag([4.0, 9.0]))
        assert np.array_equal(f.lower, np.diag([2.0, 3.0]))
        assert f.log_det_half == pytest.approx(math.log(6.0))

    def test_indefinite_rejected(self):
        # eigenvalues 3 and -1
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_reconstruction(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            d = rng.integers(1, 5)
            a = rng.standard_normal((d, d))
            cov = a @ a.T + 0.3 * np.eye(d)
            f = cholesky(cov)
            err = np.linalg.norm(f.lower @ f.lower.T - cov) / np.linalg.norm(cov)
            assert err < 1e-10
            assert np.all(f.lower.diagonal() > 0.0)

    def test_regularized_psd_always_factors(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            d = rng.integers(1, 4)
            a = rng.standard_normal((d, rng.integers(1, 4)))
            scatter = a @ a.T  # PSD, possibly singular
            scatter = 0.5 * (scatter + scatter.T)
            cholesky(regularize(scatter, 1e-8))


class TestSampleGaussian:
    def test_zero_noise_passthrough(self):
        class ZeroRng:
            def standard_normal(self, n):
                return np.zeros(n)

        out = sample_gaussian(np.array([5.0, 5.0]), cholesky(np.eye(2)), ZeroRng())
        assert np.array_equal(out, np.array([5.0, 5.0]))

    def test_linear_map(self):
        class OnesRng:
            def standard_normal(self, n):
                return np.ones(n)

        out = sample_gaussian(np.zeros(2), cholesky(np.diag([4.0, 9.0])), OnesRng())
        assert np.array_equal(out, np.array([2.0, 3.0]))

    def test_consumes_exactly_d_normals(self):
        seed = 123
        ref = np.random.default_rng(seed).standard_normal(3)
        rng = np.random.default_rng(seed)
        sample_gaussian(np.zeros(2), cholesky(np.eye(2)), rng)
        # third variate of the reference stream must still be next
        assert rng.standard_normal() == ref[2]

    def test_moments(self):
        rng = np.random.default_rng(42)
        mean = np.array([1.0, -1.0])
        cov = np.diag([4.0, 1.0])
        f = cholesky(cov)
        draws = np.array([sample_gaussian(mean, f, rng) for _ in range(100_000)])
        assert np.abs(draws.mean(axis=0) - mean).max() < 0.05
        assert np.abs(draws.var(axis=0, ddof=1) / np.diag(cov) - 1.0).max() < 0.05

    def test_empirical_covariance_within_three_standard_errors(self):
        rng = np.random.default_rng(5)
        mean = np.array([0.5, -2.0])
        cov = np.array([[2.0, 0.8], [0.8, 1.0]])
        f = cholesky(cov)
        n = 100_000
        draws = mean + rng.standard_normal((n, 2)) @ f.lower.T
        est = np.cov(draws, rowvar=False)
        # var(sample cov entry) ~ (C_ii*C_jj + C_ij^2)/n
        se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / n)
        assert np.all(np.abs(est - cov) < 3.0 * se)


class TestLogGaussianPdf:
    def test_at_mean_identity(self):
        val = log_gaussian_pdf(np.zeros(2), np.zeros(2), cholesky(np.eye(2)))
        assert val == pytest.approx(-LOG_TWO_PI, abs=1e-12)

    def test_unit_offset(self):
        val = log_gaussian_pdf(np.array([1.0, 0.0]), np.zeros(2), cholesky(np.eye(2)))
        assert val == pytest.approx(-LOG_TWO_PI - 0.5, abs=1e-12)

    def test_anisotropic(self):
        val = log_gaussian_pdf(np.array([2.0, 0.0]), np.zeros(2), cholesky(np.diag([4.0, 1.0])))
        assert val == pytest.approx(-LOG_TWO_PI - 0.5 * math.log(4.0) - 0.5, abs=1e-12)

    def test_batch_matches_pointwise(self):
        rng = np.random.default_rng(3)
        cov = np.array([[1.5, -0.4], [-0.4, 0.9]])
        mean = np.array([0.3, 1.1])
        f = cholesky(cov)
        xs = rng.standard_normal((200, 2)) * 3
        batch = log_gaussian_pdf_batch(xs, mean, f)
        point = np.array([log_gaussian_pdf(x, mean, f) for x in xs])
        np.testing.assert_allclose(batch, point, rtol=1e-12)

    def test_integrates_to_one_on_grid(self):
        # quadrature of exp(logpdf) over [-10s, 10s]^2
        cov = np.array([[1.3, 0.5], [0.5, 2.0]])
        mean = np.array([0.2, -0.7])
        f = cholesky(cov)
        s = math.sqrt(np.diag(cov).max())
        axis = np.linspace(-10 * s, 10 * s, 1201)
        h = axis[1] - axis[0]
        xx, yy = np.meshgrid(mean[0] + axis, mean[1] + axis, indexing="ij")
        pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
        mass = np.exp(log_gaussian_pdf_batch(pts, mean, f)).sum() * h * h
        assert mass == pytest.approx(1.0, abs=1e-6)
