"""A reference origin-crossing hyperplane learner for the lift plug-in contract.

This is a pool-selection scheme, not a published learning algorithm: it
samples a large pool of random origin-crossing candidate planes and keeps
the ones whose side test separates differently-labeled pairs more often
than same-labeled pairs. It exists to demonstrate that the lift upgrades
*any* origin-only learner to offset hyperplanes; plug in a real learner by
passing any callable with the same (points -> unit normals) signature to
``lift.lift_learner``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEGENERATE_NORM_TOL, Hyperplane

_MAX_PAIR_BATCH = 1024


@dataclass(frozen=True)
class LearnerConfig:
    target_bits: int
    pool_size: int = 10_000
    iterations: int = 10_000
    rng_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.target_bits <= self.pool_size:
            raise ValueError("need pool_size >= target_bits >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _as_pairs(pairs, n: int, name: str) -> np.ndarray:
    p = np.asarray(pairs, dtype=np.int64)
    if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty sequence of index pairs")
    if p.min() < 0 or p.max() >= n:
        raise ValueError(f"{name} contains indices outside the learning data")
    return p


def learn_pool_select(
    config: LearnerConfig,
    learning_data,
    same_label_pairs,
    diff_label_pairs,
) -> np.ndarray:
    """Select origin-crossing unit normals that split unlike pairs, not like ones.

    Samples ``pool_size`` candidate directions from the standard normal
    distribution (normalized to unit length). For ``iterations`` rounds, a
    batch of min(1024, available) same-label and diff-label pairs is drawn
    and each candidate is credited for every diff-label pair it splits and
    debited for every same-label pair it splits. The score is the split
    fraction over all sampled diff pairs minus the fraction over all sampled
    same pairs. The ``target_bits`` best-scoring candidates are returned in
    pool order (score ties broken by pool index), so selecting the whole
    pool returns it unchanged. Deterministic given ``rng_seed``.
    """
    X = np.asarray(learning_data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("learning data must be a 2-D array with at least 2 rows")
    n, d = X.shape
    same = _as_pairs(same_label_pairs, n, "same_label_pairs")
    diff = _as_pairs(diff_label_pairs, n, "diff_label_pairs")

    rng = np.random.default_rng(config.rng_seed)
    pool = rng.standard_normal((config.pool_size, d))
    norms = np.linalg.norm(pool, axis=1)
    while np.any(norms < DEGENERATE_NORM_TOL):
        bad = norms < DEGENERATE_NORM_TOL
        pool[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(pool, axis=1)
    pool /= norms[:, None]

    same_split = np.zeros(config.pool_size, dtype=np.int64)
    diff_split = np.zeros(config.pool_size, dtype=np.int64)
    same_total = 0
    diff_total = 0
    for _ in range(config.iterations):
        for pairs, split, is_same in ((same, same_split, True), (diff, diff_split, False)):
            batch = min(_MAX_PAIR_BATCH, pairs.shape[0])
            chosen = pairs[rng.choice(pairs.shape[0], size=batch, replace=False)]
            left = (X[chosen[:, 0]] @ pool.T) > 0
            right = (X[chosen[:, 1]] @ pool.T) > 0
            split += (left != right).sum(axis=0)
            if is_same:
                same_total += batch
            else:
                diff_total += batch

    score = diff_split / diff_total - same_split / same_total
    top = np.argsort(-score, kind="stable")[: config.target_bits]
    return pool[np.sort(top)]


def mean_abs_offset(planes: list[Hyperplane]) -> float:
    """Mean absolute offset |b| over a hyperplane family.

    Zero for origin-crossing families. When a learner wrapped by the lift is
    free to place planes anywhere, a small value relative to a random-offset
    baseline suggests the labeled structure surrounds the origin.
    """
    if not planes:
        raise ValueError("empty hyperplane list")
    return float(np.mean([abs(p.offset) for p in planes]))
