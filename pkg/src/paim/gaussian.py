"""Dense SPD linear algebra and multivariate normal sampling.

Every proposal component is stored as (mean, covariance, Cholesky
factor). The factor is computed once per parameter update and reused
for both sampling and density evaluation, so a draw costs O(d^2) and a
log-density costs one triangular solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG_TWO_PI = math.log(2.0 * math.pi)

# Asymmetry beyond this is not rounding noise; it means an accumulator
# upstream was corrupted.
SYMMETRY_ATOL = 1e-12

# A pivot at or below this cannot be distinguished from a singular
# matrix in double precision.
PIVOT_FLOOR = 1e-300


class NotPositiveDefinite(Exception):
    """Cholesky pivot fell at or below the pivot floor."""


def regularize(scatter: np.ndarray, epsilon: float) -> np.ndarray:
    """Return ``scatter + epsilon * I``.

    ``scatter`` must be square and symmetric to within 1e-12 absolute;
    the result is positive definite whenever ``scatter`` is PSD and
    ``epsilon`` > 0.
    """
    a = np.asarray(scatter, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    asym = np.abs(a - a.T).max() if a.size else 0.0
    if asym > SYMMETRY_ATOL:
        raise ValueError(f"matrix is asymmetric by {asym:.3e} (tolerance {SYMMETRY_ATOL:.0e})")
    return a + epsilon * np.eye(a.shape[0])


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor L with L @ L.T equal to the source matrix.

    ``log_det_half`` is half the log-determinant of the source matrix,
    i.e. the sum of the logs of the diagonal of L.
    """

    dim: int
    lower: np.ndarray
    log_det_half: float


def cholesky(cov: np.ndarray) -> CholeskyFactor:
    """Factor a symmetric positive definite matrix.

    Raises :class:`NotPositiveDefinite` if any pivot is at or below
    ``PIVOT_FLOOR``, which signals a missing or too-small regularizer.
    """
    a = np.asarray(cov, dtype=float)
    d = a.shape[0]
    lower = np.zeros((d, d))
    for j in range(d):
        pivot = a[j, j] - lower[j, :j] @ lower[j, :j]
        if not pivot > PIVOT_FLOOR:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at column {j} (floor {PIVOT_FLOOR:.0e})")
        ljj = math.sqrt(pivot)
        lower[j, j] = ljj
        if j + 1 < d:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / ljj
    return CholeskyFactor(dim=d, lower=lower, log_det_half=float(np.log(lower.diagonal()).sum()))


def solve_lower(lower: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Forward substitution for ``lower @ w = v`` (no inversion)."""
    d = v.shape[0]
    w = np.empty(d)
    for i in range(d):
        w[i] = (v[i] - lower[i, :i] @ w[:i]) / lower[i, i]
    return w


def sample_gaussian(mean: np.ndarray, factor: CholeskyFactor, rng: np.random.Generator) -> np.ndarray:
    """Draw ``mean + L @ z`` with z standard normal.

    Consumes exactly ``factor.dim`` normal variates from ``rng``.
    """
    z = rng.standard_normal(factor.dim)
    return mean + factor.lower @ z


def log_gaussian_pdf(x: np.ndarray, mean: np.ndarray, factor: CholeskyFactor) -> float:
    """Normalized Gaussian log-density at one point."""
    w = solve_lower(factor.lower, x - mean)
    return -0.5 * factor.dim * LOG_TWO_PI - factor.log_det_half - 0.5 * float(w @ w)


def log_gaussian_pdf_batch(xs: np.ndarray, mean: np.ndarray, factor: CholeskyFactor) -> np.ndarray:
    """Gaussian log-density for each row of ``xs``, shape (n, dim)."""
    from scipy.linalg import solve_triangular

    diff = np.asarray(xs, dtype=float) - mean
    w = solve_triangular(factor.lower, diff.T, lower=True, check_finite=False)
    quad = np.einsum("dn,dn->n", w, w)
    return -0.5 * factor.dim * LOG_TWO_PI - factor.log_det_half - 0.5 * quad
