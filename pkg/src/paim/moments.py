"""Single-pass running mean/covariance accumulators and MSE."""

from __future__ import annotations

import numpy as np

from .gaussian import regularize


class RunningMoments:
    """Running mean and scatter over pushed vectors.

    ``scatter`` is the sum of outer products of deviations from the
    mean, i.e. (count - 1) times the sample covariance. The single-pass
    update reproduces the direct two-pass formulas to ~1e-10 relative
    and keeps the scatter exactly symmetric.
    """

    __slots__ = ("count", "mean", "scatter")

    def __init__(self, dim: int):
        self.count = 0
        self.mean = np.zeros(dim)
        self.scatter = np.zeros((dim, dim))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def push(self, x: np.ndarray) -> None:
        if x.shape != self.mean.shape:
            raise ValueError(f"expected shape {self.mean.shape}, got {x.shape}")
        delta = x - self.mean
        self.count += 1
        self.mean += delta / self.count
        # (x - new mean) is delta * (count-1)/count, so the outer-product
        # increment stays symmetric to the last bit.
        self.scatter += np.outer(delta, delta) * ((self.count - 1) / self.count)

    def covariance(self, epsilon: float) -> np.ndarray:
        """Sample covariance plus ``epsilon * I``.

        With fewer than two points the sample covariance is undefined
        and the result is ``epsilon * I`` alone, so downstream proposals
        stay well defined from the very first step.
        """
        if self.count >= 2:
            return regularize(self.scatter / (self.count - 1), epsilon)
        return regularize(np.zeros((self.dim, self.dim)), epsilon)

    def copy(self) -> "RunningMoments":
        out = RunningMoments(self.dim)
        out.count = self.count
        out.mean = self.mean.copy()
        out.scatter = self.scatter.copy()
        return out


def mean_square_error(estimates, truth) -> float:
    """Squared error averaged over coordinates, then over estimates."""
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    if est.shape[0] == 0:
        raise ValueError("need at least one estimate")
    truth = np.asarray(truth, dtype=float)
    return float(np.mean(np.sum((est - truth) ** 2, axis=1) / truth.shape[0]))
