"""Intuitionistic fuzzy sample weighting.

Each training sample receives a membership degree (closeness to its own class
centroid), a non-membership degree (heterogeneity of its neighborhood), and a
combined score used to weight its slack penalty during training.  All three
are computed in the kernel-induced feature space when a Gaussian kernel is
given, and in plain input space otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .data import Dataset
from .kernels import KernelSpec, center_sq_dists_from_gram, gram_values, kernel_space_distances

# Smoothing default when the user supplies no eta: a small multiple of the
# class radius keeps the minimum membership strictly positive at any scale.
ETA_SCALE_DEFAULT = 1e-4


@dataclass(frozen=True)
class FuzzyParams:
    """Tuning knobs of the fuzzy scheme.

    eta : membership smoothing added to the class radius; None picks
        ETA_SCALE_DEFAULT * (radius + 1) per class.
    rho : neighborhood radius for the non-membership ratio, measured in
        feature-space distance; None picks the median pairwise distance
        over the training set.
    """

    eta: float | None = None
    rho: float | None = None

    def __post_init__(self):
        if self.eta is not None and not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.rho is not None and not self.rho > 0:
            raise ValueError("rho must be positive")


@dataclass(frozen=True)
class ScoreWeights:
    """Per-sample fuzzy quantities, partitioned into the two classes.

    memberships / nonmemberships / scores are aligned with the dataset row
    order; s1 and s2 hold the scores of the +1 and -1 samples respectively.
    """

    s1: np.ndarray
    s2: np.ndarray
    memberships: np.ndarray
    nonmemberships: np.ndarray
    scores: np.ndarray
    eta_pos: float
    eta_neg: float
    rho: float


def _pairwise_distances(ds: Dataset, kspec: KernelSpec | None) -> np.ndarray:
    if kspec is None:
        return squareform(pdist(ds.features))
    return kernel_space_distances(gram_values(ds.features, ds.features, kspec))


def _class_center_dists(X: np.ndarray, class_rows: np.ndarray,
                        kspec: KernelSpec | None) -> np.ndarray:
    if kspec is None:
        return np.linalg.norm(X - class_rows.mean(axis=0), axis=1)
    K_qc = gram_values(X, class_rows, kspec)
    K_cc_mean = float(gram_values(class_rows, class_rows, kspec).mean())
    return np.sqrt(center_sq_dists_from_gram(K_qc, K_cc_mean, np.ones(X.shape[0])))


def _resolve_eta(radius: float, params: FuzzyParams) -> float:
    if params.eta is not None:
        return params.eta
    return ETA_SCALE_DEFAULT * (radius + 1.0)


def membership(ds: Dataset, kspec: KernelSpec | None,
               params: FuzzyParams = FuzzyParams()) -> np.ndarray:
    """Membership degree 1 - d_i / (r + eta) per sample, toward its own class."""
    theta = np.empty(ds.m)
    for label in (1, -1):
        idx = np.flatnonzero(ds.labels == label)
        if idx.size == 0:
            raise ValueError(f"class {label:+d} is empty")
        rows = ds.features[idx]
        d = _class_center_dists(rows, rows, kspec)
        radius = float(d.max())
        eta = _resolve_eta(radius, params)
        theta[idx] = 1.0 - d / (radius + eta)
    return theta


def _resolve_rho(dists: np.ndarray, params: FuzzyParams) -> float:
    if params.rho is not None:
        return params.rho
    iu = np.triu_indices(dists.shape[0], k=1)
    # single-sample degenerate case: any positive radius behaves identically
    return float(np.median(dists[iu])) if iu[0].size else 1.0


def nonmembership(ds: Dataset, kspec: KernelSpec | None, params: FuzzyParams,
                  theta: np.ndarray) -> np.ndarray:
    """Non-membership (1 - theta_i) * mu_i with mu_i the heterogeneous-neighbor ratio.

    A sample's neighborhood is closed at radius rho and counts the sample
    itself in the denominator, so the ratio is always well defined.
    """
    dists = _pairwise_distances(ds, kspec)
    rho = _resolve_rho(dists, params)
    within = dists <= rho
    opposite = ds.labels[:, None] != ds.labels[None, :]
    total = within.sum(axis=1)
    hetero = (within & opposite).sum(axis=1)
    mu = hetero / total
    return (1.0 - theta) * mu


def score(theta: float, sigma: float) -> float:
    """Combine membership and non-membership into a single weight in [0, 1]."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError("membership must lie in [0, 1]")
    if not 0.0 <= sigma <= 1.0 - theta + 1e-15:
        raise ValueError("non-membership must lie in [0, 1 - membership]")
    if sigma == 0.0:
        return theta
    if theta <= sigma:
        return 0.0
    return (1.0 - sigma) / (2.0 - theta - sigma)


def score_vector(theta: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Vectorized score(); branch order matches the scalar form."""
    third = (1.0 - sigma) / (2.0 - theta - sigma)
    out = np.where(sigma == 0.0, theta, np.where(theta <= sigma, 0.0, third))
    return out


def assign_scores(ds: Dataset, kspec: KernelSpec | None,
                  params: FuzzyParams = FuzzyParams()) -> ScoreWeights:
    """Run the full membership -> non-membership -> score pipeline on a dataset."""
    if ds.m1 == 0 or ds.m2 == 0:
        raise ValueError("both classes must be nonempty")
    dists = _pairwise_distances(ds, kspec)
    theta = np.empty(ds.m)
    etas = {}
    for label in (1, -1):
        idx = np.flatnonzero(ds.labels == label)
        rows = ds.features[idx]
        d = _class_center_dists(rows, rows, kspec)
        radius = float(d.max())
        etas[label] = _resolve_eta(radius, params)
        theta[idx] = 1.0 - d / (radius + etas[label])

    rho = _resolve_rho(dists, params)
    within = dists <= rho
    opposite = ds.labels[:, None] != ds.labels[None, :]
    mu = (within & opposite).sum(axis=1) / within.sum(axis=1)
    sigma = (1.0 - theta) * mu
    scores = score_vector(theta, sigma)
    return ScoreWeights(
        s1=scores[ds.labels == 1],
        s2=scores[ds.labels == -1],
        memberships=theta,
        nonmemberships=sigma,
        scores=scores,
        eta_pos=etas[1],
        eta_neg=etas[-1],
        rho=rho,
    )


def uniform_scores(ds: Dataset) -> ScoreWeights:
    """All-ones weighting, the ablation that switches the fuzzy scheme off."""
    ones = np.ones(ds.m)
    return ScoreWeights(
        s1=ones[ds.labels == 1].copy(),
        s2=ones[ds.labels == -1].copy(),
        memberships=ones.copy(),
        nonmemberships=np.zeros(ds.m),
        scores=ones,
        eta_pos=float("nan"),
        eta_neg=float("nan"),
        rho=float("nan"),
    )
