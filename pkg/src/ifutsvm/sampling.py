"""Undersampling and universum construction for imbalanced twin-SVM training.

The plan built here pairs an undersampled majority subset (one negative row
per positive sample) with a universum set generated by random averaging of
cross-class pairs, plus a reduced universum subset used by the minority-class
plane.  Sub-seeds for the three random draws are derived from the master seed
by fixed offsets so the streams are independently reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset

# master-seed offsets: undersampling, pair averaging, subset reduction,
# top-up pairs for the mildly imbalanced regime
_OFF_UNDERSAMPLE = 0
_OFF_PAIRS = 1
_OFF_REDUCE = 2
_OFF_EXTRA = 3


@dataclass(frozen=True)
class SamplingPlan:
    """Materialized sampling decisions for one training run.

    x2_star holds m1 distinct negative rows (indices into the negative class
    in x2_star_indices); universum holds the m2 - m1 averaged points with
    their source pair indices (positive idx, negative idx) in pair_log;
    universum_star holds the ceil(m1 / 2) rows used by the minority plane.
    balanced marks the m1 == m2 fallback where no universum exists.
    """

    x2_star: np.ndarray
    x2_star_indices: np.ndarray
    universum: np.ndarray
    universum_star: np.ndarray
    pair_log: np.ndarray
    extra_pair_log: np.ndarray
    seed: int
    balanced: bool

    @property
    def g(self) -> int:
        return self.universum_star.shape[0]


def undersample_majority(ds: Dataset, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Pick m1 distinct negative rows uniformly without replacement."""
    if ds.m1 > ds.m2:
        raise ValueError("positive class larger than negative class")
    if ds.m1 < 1:
        raise ValueError("positive class is empty")
    rng = np.random.default_rng(seed)
    indices = rng.choice(ds.m2, size=ds.m1, replace=False)
    return ds.negatives()[indices], indices


def generate_universum(ds: Dataset, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Random averaging: each row is the midpoint of a random (+, -) sample pair.

    Returns the points and a (count, 2) log of the source indices (into the
    positive and negative class respectively).
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    pos, neg = ds.positives(), ds.negatives()
    if pos.shape[0] == 0 or neg.shape[0] == 0:
        raise ValueError("both classes must be nonempty")
    rng = np.random.default_rng(seed)
    pi = rng.integers(0, pos.shape[0], size=count)
    ni = rng.integers(0, neg.shape[0], size=count)
    points = 0.5 * (pos[pi] + neg[ni]).reshape(count, ds.n)
    return points, np.column_stack([pi, ni]).astype(np.int64)


def reduce_universum(universum: np.ndarray, g: int, seed: int) -> np.ndarray:
    """Pick g distinct universum rows uniformly without replacement."""
    if g > universum.shape[0]:
        raise ValueError("cannot reduce universum below the requested size")
    rng = np.random.default_rng(seed)
    idx = rng.choice(universum.shape[0], size=g, replace=False)
    return universum[idx]


def build_plan(ds: Dataset, seed: int) -> SamplingPlan:
    """Construct the full sampling plan for one fit.

    With u = m2 - m1 and g = ceil(m1 / 2): the universum gets u averaged
    points and the reduced set g of them.  When 0 < u < g, extra averaged
    points (from a separate seed stream) top the reduced set up to g rows.
    When the classes are balanced (u = 0) no universum is generated and the
    balanced flag is set so training degrades to a weighted twin SVM.
    """
    if ds.m1 < 2:
        raise ValueError("positive class needs at least 2 samples")
    x2_star, x2_idx = undersample_majority(ds, seed + _OFF_UNDERSAMPLE)
    u = ds.m2 - ds.m1
    n = ds.n
    if u == 0:
        empty = np.zeros((0, n))
        no_pairs = np.zeros((0, 2), dtype=np.int64)
        return SamplingPlan(x2_star, x2_idx, empty, empty, no_pairs, no_pairs,
                            seed, balanced=True)
    universum, pairs = generate_universum(ds, u, seed + _OFF_PAIRS)
    g = math.ceil(ds.m1 / 2)
    if u >= g:
        universum_star = reduce_universum(universum, g, seed + _OFF_REDUCE)
        extra_pairs = np.zeros((0, 2), dtype=np.int64)
    else:
        extra, extra_pairs = generate_universum(ds, g - u, seed + _OFF_EXTRA)
        universum_star = np.vstack([universum, extra])
    return SamplingPlan(x2_star, x2_idx, universum, universum_star, pairs,
                        extra_pairs, seed, balanced=False)
