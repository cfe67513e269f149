"""Confusion metrics, cross-validated grid search, and rank statistics.

The grid search walks the hyperparameter lattice in a fixed nested order
(c1 outermost, then c3, cu, epsilon, width) and keeps the first best point,
so model selection is reproducible.  Rank aggregation uses average ranks with
tie averaging (best accuracy = rank 1) and feeds the Friedman chi-square, its
F-form correction, and the Nemenyi critical difference.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .data import Dataset
from .kernels import KernelSpec
from .membership import FuzzyParams
from .models import Hyperparams, TrainingError, fit_ifutsvm_id, fit_utsvm, predict
from .qp import NumericalError
from .sampling import generate_universum
from .seeds import mix_seed

MODEL_KINDS = ("utsvm", "ifutsvm-id")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ValueError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


def confusion(y_true: np.ndarray, y_pred: np.ndarray) -> ConfusionMatrix:
    """Count prediction outcomes; +1 is the positive class."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("label vectors must have equal length")
    return ConfusionMatrix(
        tp=int(np.sum((y_true == 1) & (y_pred == 1))),
        fn=int(np.sum((y_true == 1) & (y_pred == -1))),
        fp=int(np.sum((y_true == -1) & (y_pred == 1))),
        tn=int(np.sum((y_true == -1) & (y_pred == -1))),
    )


@dataclass(frozen=True)
class MetricsReport:
    """Standard rates; a rate whose denominator is zero is None, never 0."""

    accuracy: float | None
    sensitivity: float | None
    specificity: float | None
    precision: float | None


def _rate(num: int, den: int) -> float | None:
    return num / den if den else None


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    return MetricsReport(
        accuracy=_rate(cm.tp + cm.tn, cm.total),
        sensitivity=_rate(cm.tp, cm.tp + cm.fn),
        specificity=_rate(cm.tn, cm.tn + cm.fp),
        precision=_rate(cm.tp, cm.tp + cm.fp),
    )


# ---------------------------------------------------------------------------
# cross-validated grid search

# published search ranges: penalties over 10^-5..10^5, tube over four values,
# Gaussian widths over 2^-5..2^5
PENALTY_RANGE = tuple(10.0**k for k in range(-5, 6))
EPSILON_RANGE = (0.1, 0.3, 0.5, 0.6)
WIDTH_RANGE = tuple(2.0**k for k in range(-5, 6))


@dataclass(frozen=True)
class GridSpec:
    """Hyperparameter lattice; c2 is tied to c1 and c4 to c3 when expanded."""

    c1: tuple = PENALTY_RANGE
    c3: tuple = PENALTY_RANGE
    cu: tuple = PENALTY_RANGE
    epsilon: tuple = EPSILON_RANGE
    width: tuple | None = WIDTH_RANGE  # None -> linear models
    fuzzy: FuzzyParams = FuzzyParams()

    def points(self):
        widths = tuple(sorted(self.width)) if self.width is not None else (None,)
        return itertools.product(sorted(self.c1), sorted(self.c3), sorted(self.cu),
                                 sorted(self.epsilon), widths)

    def size(self) -> int:
        w = len(self.width) if self.width is not None else 1
        return len(self.c1) * len(self.c3) * len(self.cu) * len(self.epsilon) * w


def make_hyperparams(c1: float, c3: float, cu: float, epsilon: float,
                     width: float | None, fuzzy: FuzzyParams = FuzzyParams(),
                     seed: int = 0, delta: float | None = None) -> Hyperparams:
    kernel = KernelSpec(width) if width is not None else None
    return Hyperparams(c1=c1, c2=c1, c3=c3, c4=c3, cu=cu, epsilon=epsilon,
                       kernel=kernel, delta=delta, fuzzy=fuzzy, seed=seed)


def stratified_kfold(ds: Dataset, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded stratified folds: per-class shuffle, round-robin assignment.

    Returns (train_idx, val_idx) pairs into the dataset rows.
    """
    if k < 2:
        raise ValueError("need at least 2 folds")
    rng = np.random.default_rng(seed)
    assignment = np.empty(ds.m, dtype=np.int64)
    for label in (1, -1):
        idx = np.flatnonzero(ds.labels == label)
        perm = rng.permutation(idx.size)
        assignment[idx[perm]] = np.arange(idx.size) % k
    folds = []
    for fold in range(k):
        val = np.flatnonzero(assignment == fold)
        train = np.flatnonzero(assignment != fold)
        folds.append((train, val))
    return folds


def fit_model(kind: str, train: Dataset, hp: Hyperparams, *, uniform: bool = False,
              universum_seed: int | None = None):
    """Train one model of the requested kind.

    For the UTSVM baseline the universum is generated here by random
    averaging, m2 - m1 points, from its own seed stream.
    """
    if kind == "ifutsvm-id":
        return fit_ifutsvm_id(train, hp, uniform=uniform)
    if kind == "utsvm":
        count = train.m2 - train.m1
        seed = universum_seed if universum_seed is not None else mix_seed(hp.seed, "universum")
        univ, _ = generate_universum(train, count, seed)
        return fit_utsvm(train, univ, hp)
    raise ValueError(f"unknown model kind: {kind!r}")


def _subset(ds: Dataset, idx: np.ndarray, tag: str) -> Dataset:
    return Dataset(f"{ds.name}/{tag}", ds.features[idx], ds.labels[idx])


def grid_search_cv(train: Dataset, kind: str, grid: GridSpec, k: int, seed: int,
                   *, uniform: bool = False) -> tuple[Hyperparams, list[dict]]:
    """Mean CV accuracy per lattice point; argmax with first-in-lattice ties.

    Folds that cannot be trained (single-class training part, solver failure)
    score NaN and are flagged; a point's mean ignores NaN folds.  Points whose
    folds all fail are never selected.
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind: {kind!r}")
    if min(train.m1, train.m2) < k:
        raise ValueError("each class needs at least k samples for k folds")
    folds = stratified_kfold(train, k, mix_seed(seed, "folds"))
    fold_sets = [( _subset(train, tr, f"cv{j}t"), _subset(train, va, f"cv{j}v"))
                 for j, (tr, va) in enumerate(folds)]
    fold_seeds = [mix_seed(seed, "fit", j) for j in range(k)]

    table: list[dict] = []
    best_row = None
    best_hp = None
    for c1, c3, cu, eps, width in grid.points():
        accs = np.full(k, np.nan)
        flags: list[str] = []
        for j, (tr, va) in enumerate(fold_sets):
            if tr.m1 == 0 or tr.m2 == 0:
                flags.append(f"fold{j}:single-class")
                continue
            hp = make_hyperparams(c1, c3, cu, eps, width, grid.fuzzy, seed=fold_seeds[j])
            try:
                model = fit_model(kind, tr, hp, uniform=uniform,
                                  universum_seed=mix_seed(fold_seeds[j], "universum"))
            except (NumericalError, TrainingError) as exc:
                flags.append(f"fold{j}:{type(exc).__name__}")
                continue
            if model.dual_report is not None and model.dual_report.balanced_fallback:
                flags.append(f"fold{j}:balanced-fallback")
            pred = predict(model, va.features)
            accs[j] = float(np.mean(pred == va.labels))
        mean = float(np.nanmean(accs)) if np.any(~np.isnan(accs)) else float("-inf")
        row = {
            "c1": c1, "c3": c3, "cu": cu, "epsilon": eps, "width": width,
            "mean_accuracy": mean,
            "fold_accuracies": [None if np.isnan(a) else float(a) for a in accs],
            "flags": flags,
        }
        table.append(row)
        if best_row is None or mean > best_row["mean_accuracy"]:
            best_row = row
            best_hp = make_hyperparams(c1, c3, cu, eps, width, grid.fuzzy,
                                       seed=mix_seed(seed, "refit"))
    return best_hp, table


# ---------------------------------------------------------------------------
# rank statistics


@dataclass(frozen=True)
class RankTable:
    """Per-dataset ranks of each model (1 = best accuracy, ties averaged)."""

    accuracies: np.ndarray
    ranks: np.ndarray
    average_ranks: np.ndarray


def average_ranks(accuracies: np.ndarray) -> RankTable:
    acc = np.asarray(accuracies, dtype=np.float64)
    if acc.ndim != 2 or acc.shape[0] < 1 or acc.shape[1] < 2:
        raise ValueError("need an N x p accuracy matrix with p >= 2")
    if np.any(np.isnan(acc)):
        raise ValueError("accuracy matrix contains NaN")
    ranks = np.vstack([rankdata(-row, method="average") for row in acc])
    return RankTable(acc, ranks, ranks.mean(axis=0))


@dataclass(frozen=True)
class FriedmanResult:
    chi_sq: float
    f_stat: float | None  # None when the correction's denominator vanishes


def friedman(avg_ranks: np.ndarray, N: int, p: int) -> FriedmanResult:
    """Friedman chi-square over average ranks, plus the F-form correction."""
    R = np.asarray(avg_ranks, dtype=np.float64)
    if p < 2 or N < 2:
        raise ValueError("need p >= 2 models and N >= 2 datasets")
    if R.shape != (p,):
        raise ValueError("average ranks must have length p")
    if np.any(R < 1.0) or np.any(R > p):
        raise ValueError("average ranks must lie in [1, p]")
    chi_sq = 12.0 * N / (p * (p + 1)) * (float(np.sum(R**2)) - p * (p + 1) ** 2 / 4.0)
    denom = N * (p - 1) - chi_sq
    f_stat = (N - 1) * chi_sq / denom if denom > 0 else None
    return FriedmanResult(chi_sq, f_stat)


def nemenyi_cd(p: int, N: int, q_alpha: float) -> float:
    """Critical difference q_alpha * sqrt(p (p+1) / (6 N))."""
    if p <= 0 or N <= 0 or q_alpha < 0:
        raise ValueError("arguments must be positive (q_alpha nonnegative)")
    return q_alpha * float(np.sqrt(p * (p + 1) / (6.0 * N)))


def pairwise_significance(avg_ranks: np.ndarray, cd: float) -> np.ndarray:
    """Boolean matrix: |R_i - R_j| > cd."""
    R = np.asarray(avg_ranks, dtype=np.float64)
    return np.abs(R[:, None] - R[None, :]) > cd


def load_benchmark_matrix() -> tuple[list[str], list[str], np.ndarray]:
    """Bundled 46-dataset KEEL accuracy table of the six published classifiers.

    Returns (dataset names, model names, accuracy matrix in percent).
    """
    import csv
    from importlib import resources

    ref = resources.files("ifutsvm.resources") / "keel_benchmark_accuracies.csv"
    with ref.open(newline="") as fh:
        rows = list(csv.reader(fh))
    models = rows[0][1:]
    names = [r[0] for r in rows[1:] if r]
    acc = np.array([[float(v) for v in r[1:]] for r in rows[1:] if r])
    return names, models, acc
