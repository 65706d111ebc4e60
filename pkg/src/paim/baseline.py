"""Independent parallel MH chains: the non-adaptive reference sampler.

Same chains, same initial mixture proposals, same random streams as the
adaptive sampler, but the proposals are never updated and every chain
keeps a fixed share of the sample budget. Any accuracy gap against
:func:`paim.sampler.run_paim` on a matched seed is therefore
attributable to the adaptation alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sampler import ChainState, RunRecord, chain_streams, initial_proposals, mh_step
from .targets import TargetDensity


@dataclass
class IpcConfig:
    """Run settings for the fixed-proposal baseline.

    Mirrors :class:`paim.sampler.PaimConfig` minus the adaptation knobs.
    The budget splits as evenly as possible: each chain receives
    ``ceil(total/n)`` iterations until the remainder runs out.
    """

    n_chains: int
    total_samples: int
    init_means: np.ndarray
    init_states: np.ndarray
    init_sigma: float
    seed: int = 0
    discard_burn_in: bool = False

    def __post_init__(self):
        self.init_means = np.asarray(self.init_means, dtype=float)
        self.init_states = np.asarray(self.init_states, dtype=float)

    @property
    def dim(self) -> int:
        return self.init_states.shape[1]

    @classmethod
    def from_paim(cls, config) -> "IpcConfig":
        return cls(
            n_chains=config.n_chains,
            total_samples=config.total_samples,
            init_means=config.init_means,
            init_states=config.init_states,
            init_sigma=config.init_sigma,
            seed=config.seed,
            discard_burn_in=config.discard_burn_in,
        )

    def validate(self) -> None:
        if self.n_chains < 1:
            raise ValueError("n_chains must be at least 1")
        if self.total_samples < self.n_chains:
            raise ValueError("total_samples must be at least n_chains")
        if self.init_sigma <= 0.0:
            raise ValueError("init_sigma must be positive")
        if self.init_means.shape != (self.n_chains, 2, self.dim):
            raise ValueError(
                f"init_means must have shape ({self.n_chains}, 2, {self.dim}), got {self.init_means.shape}"
            )
        if self.init_states.shape != (self.n_chains, self.dim):
            raise ValueError(
                f"init_states must have shape ({self.n_chains}, {self.dim}), got {self.init_states.shape}"
            )


def ipc_budgets(total_samples: int, n_chains: int) -> np.ndarray:
    """Per-chain iteration counts: ceil(total/n) each, clipped so the sum
    is exactly ``total_samples``."""
    share = math.ceil(total_samples / n_chains)
    budgets = np.empty(n_chains, dtype=np.int64)
    remaining = total_samples
    for j in range(n_chains):
        budgets[j] = min(share, remaining)
        remaining -= budgets[j]
    return budgets


def run_ipc(config: IpcConfig, target: TargetDensity) -> RunRecord:
    """Run the fixed-proposal chains round-robin until the budget is spent.

    Chains advance in ascending index order within a step, exactly like
    the adaptive run, so a seed-matched comparison lines up sample by
    sample.
    """
    config.validate()
    if target.dim != config.dim:
        raise ValueError(f"target dim {target.dim} does not match config dim {config.dim}")

    n = config.n_chains
    total = config.total_samples
    budgets = ipc_budgets(total, n)

    rngs = chain_streams(config.seed, n)
    proposals = initial_proposals(config)
    chains = [ChainState(index=j, current=config.init_states[j].copy()) for j in range(n)]

    samples = np.empty((total, config.dim))
    sample_step = np.empty(total, dtype=np.int64)
    sample_chain = np.empty(total, dtype=np.int64)
    sample_iteration = np.empty(total, dtype=np.int64)
    sample_accepted = np.empty(total, dtype=bool)
    activity_rows: list[np.ndarray] = []

    log_target_cache = [None] * n
    log_prop_cache = [None] * n

    drawn = 0
    t = -1
    while drawn < total:
        t += 1
        remaining = np.array([chains[j].iterations < budgets[j] for j in range(n)])
        activity_rows.append(remaining)
        for j in range(n):
            if not remaining[j]:
                continue
            accepted, lt, lp = mh_step(
                chains[j], proposals[j], target, rngs[j], log_target_cache[j], log_prop_cache[j]
            )
            log_target_cache[j] = lt
            log_prop_cache[j] = lp
            samples[drawn] = chains[j].current
            sample_step[drawn] = t
            sample_chain[drawn] = j
            sample_iteration[drawn] = chains[j].iterations
            sample_accepted[drawn] = accepted
            drawn += 1

    return RunRecord(
        samples=samples,
        sample_step=sample_step,
        sample_chain=sample_chain,
        sample_iteration=sample_iteration,
        sample_accepted=sample_accepted,
        activity=np.stack(activity_rows),
        budgets=np.array([c.iterations for c in chains], dtype=np.int64),
        proposals=proposals,
        global_mean=None,
        global_cov=None,
    )
