"""Monte Carlo network layer: heralded link generation, purification, swapping.

Links are generated by a parameterized heralded Bell source (no interference
physics is modeled; the per-attempt success probability and the heralded pair
state are declared inputs).  Each purification round consumes two pairs of
the previous level and retries on failure, so a level-``r`` pair consumes a
geometrically distributed number of raw pairs with mean ``2^r`` divided by
the success probabilities.  Entanglement swapping is applied left to right;
a failed (lost-photon) swap restarts the chain, which exactly implements
success-conditioned sampling.

Randomness comes from a counter-based Philox generator (numpy's
``Philox`` bit generator), so runs are reproducible across platforms given
the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .protocols import (
    PairState,
    ParityMeasurement,
    entanglement_swap,
    purify,
)
from .qstate import BellLabel, DensityMatrix, bell, fidelity, tensor

__all__ = [
    "RNG_ALGORITHM",
    "LinkModel",
    "ChainConfig",
    "StageStats",
    "RunStats",
    "make_rng",
    "generate_link",
    "run_chain",
    "run_many",
    "emission_link",
]

RNG_ALGORITHM = "philox4x64"


@dataclass(frozen=True)
class LinkModel:
    """Heralded Bell source: per-attempt success probability and pair state."""

    p_gen: float
    raw_state: DensityMatrix
    attempt_time: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.p_gen <= 1.0):
            raise ValueError("p_gen must be in (0, 1]")
        if self.raw_state.n_qubits != 2:
            raise ValueError("raw_state must be a 2-qubit density matrix")
        if self.attempt_time <= 0.0:
            raise ValueError("attempt_time must be positive")


def emission_link(p_emit: float, raw_state: DensityMatrix,
                  attempt_time: float = 1.0, splitter: str = "halve") -> LinkModel:
    """Derive a LinkModel from an emission probability behind a 50:50 splitter.

    ``splitter='halve'`` folds the splitter's 50% photon loss into the
    heralding probability (the default interpretation); ``'none'`` ignores
    the splitter.
    """
    if splitter == "halve":
        return LinkModel(p_emit / 2.0, raw_state, attempt_time)
    if splitter == "none":
        return LinkModel(p_emit, raw_state, attempt_time)
    raise ValueError("splitter must be 'halve' or 'none'")


@dataclass(frozen=True)
class ChainConfig:
    n_links: int
    link: LinkModel
    parity_impl: ParityMeasurement
    purify_rounds: int = 0
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_links < 1:
            raise ValueError("n_links must be at least 1")
        if self.purify_rounds < 0:
            raise ValueError("purify_rounds must be non-negative")


@dataclass(frozen=True)
class StageStats:
    name: str
    attempts: int


@dataclass(frozen=True)
class RunStats:
    end_to_end_fidelity: float
    total_attempts: int
    elapsed_time: float
    per_stage: list[StageStats] = field(default_factory=list)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def generate_link(model: LinkModel, rng: np.random.Generator) -> tuple[int, PairState]:
    """Attempt heralded generation until success; returns (attempts, pair)."""
    attempts = int(rng.geometric(model.p_gen))
    return attempts, PairState(model.raw_state)


def _pair_layout(a: PairState, b: PairState) -> DensityMatrix:
    """Joint register for purification: pairs (0,2) and (1,3) from two A-B pairs."""
    big = tensor(a.rho, b.rho).matrix.reshape([2] * 8)
    perm = [0, 2, 1, 3]
    big = big.transpose(perm + [p + 4 for p in perm])
    return DensityMatrix(4, big.reshape(16, 16))


def _purified_pair(cfg: ChainConfig, level: int, rng: np.random.Generator) -> tuple[int, PairState]:
    """Recursively build a level-``level`` purified pair, retrying failures."""
    if level == 0:
        return generate_link(cfg.link, rng)
    attempts = 0
    while True:
        at_a, pair_a = _purified_pair(cfg, level - 1, rng)
        at_b, pair_b = _purified_pair(cfg, level - 1, rng)
        attempts += at_a + at_b
        success_prob, out = purify(_pair_layout(pair_a, pair_b), cfg.parity_impl)
        if rng.random() < success_prob:
            return attempts, out


def _sample_swap(state: PairState, right: PairState,
                 parity_impl: ParityMeasurement, rng: np.random.Generator):
    """Sample one swap outcome; returns the corrected pair or None on failure."""
    branches = entanglement_swap(state, right, parity_impl)
    probs = np.array([b.prob for b in branches])
    total = probs.sum()
    if rng.random() >= total:
        return None
    idx = rng.choice(len(branches), p=probs / total)
    return branches[idx].pair


def run_chain(cfg: ChainConfig) -> RunStats:
    """Simulate one end-to-end entanglement delivery over the chain."""
    rng = make_rng(cfg.rng_seed)
    total_attempts = 0
    restarts = 0
    while True:  # a failed swap restarts the chain
        stages = []
        pairs = []
        for i in range(cfg.n_links):
            attempts, pair = _purified_pair(cfg, cfg.purify_rounds, rng)
            total_attempts += attempts
            stages.append(StageStats(f"link{i}", attempts))
            pairs.append(pair)
        state = pairs[0]
        failed = False
        for i in range(1, cfg.n_links):
            state = _sample_swap(state, pairs[i], cfg.parity_impl, rng)
            if state is None:
                failed = True
                break
        if failed:
            restarts += 1
            continue
        fid = fidelity(state.rho, bell(BellLabel.PHI_PLUS))
        stages.append(StageStats("chain_restarts", restarts))
        return RunStats(
            end_to_end_fidelity=fid,
            total_attempts=total_attempts,
            elapsed_time=total_attempts * cfg.link.attempt_time,
            per_stage=stages,
        )


def run_many(cfg: ChainConfig, shots: int) -> list[RunStats]:
    """Independent repetitions with per-shot seeds derived from the config seed."""
    seeds = np.random.SeedSequence(cfg.rng_seed).generate_state(shots, dtype=np.uint64)
    out = []
    for s in seeds:
        shot_cfg = ChainConfig(cfg.n_links, cfg.link, cfg.parity_impl,
                               cfg.purify_rounds, int(s))
        out.append(run_chain(shot_cfg))
    return out
