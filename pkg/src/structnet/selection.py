"""Rankings, the end-to-end selection pipeline, k-NN evaluation and synthetic data."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from . import admm
from .admm import SolverConfig, SolverResult
from .data import FeatureMatrix, Target, TargetKind, standardize
from .errors import ClassTooSmall, EmptySubset, InvalidKList, StructNetError
from .info import InteractionMatrix, build_interaction_matrix

logger = logging.getLogger(__name__)


class Method(str, Enum):
    INELASTICNET = "inelasticnet"
    ELASTICNET = "elasticnet"
    LASSO = "lasso"
    RIDGE = "ridge"

    @classmethod
    def parse(cls, value) -> "Method":
        try:
            return cls(getattr(value, "value", value).lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise StructNetError(f"unknown method {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class SelectionReport:
    ranking: tuple[int, ...]
    selected: frozenset[int]
    beta_star: np.ndarray
    method: Method = Method.INELASTICNET
    config: dict = field(default_factory=dict)
    feature_names: tuple[str, ...] = ()

    def top(self, k: int) -> list[int]:
        return list(self.ranking[:k])

    def to_dict(self) -> dict:
        names = self.feature_names or tuple(str(i) for i in range(len(self.beta_star)))
        return {
            "method": self.method.value,
            "config": self.config,
            "ranking": list(self.ranking),
            "ranking_names": [names[i] for i in self.ranking],
            "selected": sorted(self.selected),
            "selected_names": [names[i] for i in sorted(self.selected)],
            "beta": [float(b) for b in self.beta_star],
        }


def rank_features(
    beta_star,
    zero_tol: float = 1e-8,
    method: Method | str = Method.INELASTICNET,
    config: dict | None = None,
    feature_names: Sequence[str] = (),
) -> SelectionReport:
    """Order features by |beta| (descending, lower index first on ties)."""
    if zero_tol < 0:
        raise StructNetError("zero_tol must be >= 0")
    b = np.asarray(beta_star, dtype=float).ravel()
    mag = np.abs(b)
    ranking = tuple(int(i) for i in np.lexsort((np.arange(b.size), -mag)))
    selected = frozenset(int(i) for i in np.flatnonzero(mag > zero_tol))
    return SelectionReport(
        ranking, selected, b, Method.parse(method), dict(config or {}), tuple(feature_names)
    )


@dataclass(frozen=True)
class SelectionOutcome:
    report: SelectionReport
    result: SolverResult
    interaction: InteractionMatrix | None


def regression_problem(data: FeatureMatrix, target: Target, standardized: bool = True):
    """Design matrix (N x M) and response for the regression step.

    Discrete targets regress on their class ids. With ``standardized`` the
    features are standardized and the response is centered (there is no
    intercept in the model).
    """
    if standardized:
        data = standardize(data)[0]
    y = np.array(target.values, dtype=float)
    if standardized:
        y = y - y.mean()
    return data, y


def select_features(
    data: FeatureMatrix,
    target: Target,
    method: Method | str = Method.INELASTICNET,
    cfg: SolverConfig | None = None,
    standardized: bool = True,
    zero_diagonal: bool = False,
    zero_tol: float = 1e-8,
    interaction: InteractionMatrix | None = None,
) -> SelectionOutcome:
    """Build W (InElasticNet only), solve, and rank."""
    method = Method.parse(method)
    cfg = cfg or SolverConfig()
    if target.M != data.M:
        raise StructNetError(f"target has {target.M} samples, data has {data.M}")
    X_data, y = regression_problem(data, target, standardized)
    if method is Method.INELASTICNET:
        if interaction is None:
            interaction = build_interaction_matrix(X_data, target, zero_diagonal=zero_diagonal)
        result = admm.solve(X_data.design, y, interaction, cfg)
        used = cfg
    else:
        interaction = None
        used = admm.baseline_config(method.value, cfg)
        result = admm.solve(X_data.design, y, None, used)
    report = rank_features(
        result.beta_star, zero_tol, method, used.to_dict(), data.feature_names
    )
    return SelectionOutcome(report, result, interaction)


def stratified_folds(labels, folds: int, seed: int) -> np.ndarray:
    """Fold id per sample; each class is shuffled and dealt round-robin."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    fold_of = np.empty(labels.size, dtype=np.int64)
    offset = 0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(idx.size)]
        # continue dealing where the previous class stopped to balance fold sizes
        fold_of[idx] = (np.arange(idx.size) + offset) % folds
        offset = (offset + idx.size) % folds
    return fold_of


def knn_predict(train_X, train_y, test_X, k_neighbors: int, n_classes: int) -> np.ndarray:
    """Majority vote of the k nearest (Euclidean) training points.

    Distance ties keep the lower training index; vote ties go to the
    smallest class id.
    """
    d2 = (
        np.sum(test_X**2, axis=1)[:, None]
        - 2.0 * test_X @ train_X.T
        + np.sum(train_X**2, axis=1)[None, :]
    )
    k = min(k_neighbors, train_X.shape[0])
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    votes = np.zeros((test_X.shape[0], n_classes), dtype=np.int64)
    rows = np.repeat(np.arange(test_X.shape[0]), k)
    np.add.at(votes, (rows, train_y[nearest].ravel()), 1)
    return votes.argmax(axis=1)


def knn_cross_validate(
    data: FeatureMatrix,
    target: Target,
    feature_subset: Sequence[int],
    folds: int = 10,
    k_neighbors: int = 5,
    seed: int = 0,
) -> tuple[float, float]:
    """Stratified k-fold accuracy of a k-NN classifier on a column subset.

    Returns (mean, population std) of the per-fold accuracies.
    """
    if target.kind is not TargetKind.DISCRETE:
        raise StructNetError("cross-validation needs a discrete target")
    subset = list(feature_subset)
    if not subset:
        raise EmptySubset("feature subset is empty")
    if folds < 2:
        raise StructNetError(f"folds must be >= 2, got {folds}")
    if k_neighbors < 1:
        raise StructNetError(f"k_neighbors must be >= 1, got {k_neighbors}")
    labels = target.labels
    counts = np.bincount(labels)
    if counts.min() < folds:
        raise ClassTooSmall(
            f"smallest class has {counts.min()} samples, fewer than {folds} folds"
        )
    X = data.values[:, subset]
    fold_of = stratified_folds(labels, folds, seed)
    accs = []
    for f in range(folds):
        test = fold_of == f
        pred = knn_predict(X[~test], labels[~test], X[test], k_neighbors, target.C)
        accs.append(float(np.mean(pred == labels[test])))
    accs = np.array(accs)
    return float(accs.mean()), float(accs.std())


def feasible_folds(target: Target, folds: int) -> int:
    smallest = int(np.bincount(target.labels).min())
    if smallest < 2:
        raise ClassTooSmall("a class has fewer than 2 samples; cannot cross-validate")
    if smallest < folds:
        logger.warning("reducing folds from %d to %d (smallest class size)", folds, smallest)
        return smallest
    return folds


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[tuple[int, float, float], ...]
    folds: int
    classifier: str
    method: str = ""
    ranking: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "classifier": self.classifier,
            "folds": self.folds,
            "ranking": list(self.ranking),
            "curve": [{"k": k, "mean_accuracy": m, "std": s} for k, m, s in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "mean_accuracy", "std"])
            for k, m, s in self.rows:
                w.writerow([k, format(m, ".17g"), format(s, ".17g")])


def check_k_list(k_list: Sequence[int], N: int) -> list[int]:
    ks = [int(k) for k in k_list]
    if not ks:
        raise InvalidKList("k_list is empty")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise InvalidKList(f"k_list must be strictly increasing, got {ks}")
    if ks[0] < 1 or ks[-1] > N:
        raise InvalidKList(f"k values must lie in 1..{N}, got {ks}")
    return ks


def accuracy_curve(
    data: FeatureMatrix,
    target: Target,
    method: Method | str,
    k_list: Sequence[int],
    cfg: SolverConfig | None = None,
    folds: int = 10,
    k_neighbors: int = 5,
    seed: int = 0,
    standardized: bool = True,
    ranking: Sequence[int] | None = None,
) -> EvalReport:
    """Cross-validated k-NN accuracy of the top-k ranked features for each k.

    Folds depend only on ``seed`` and the labels, so curves from different
    methods share fold assignments.
    """
    ks = check_k_list(k_list, data.N)
    method = Method.parse(method)
    if ranking is None:
        ranking = select_features(data, target, method, cfg, standardized).report.ranking
    folds = feasible_folds(target, folds)
    eval_data = standardize(data)[0] if standardized else data
    rows = []
    for k in ks:
        mean, std = knn_cross_validate(eval_data, target, ranking[:k], folds, k_neighbors, seed)
        rows.append((k, mean, std))
    return EvalReport(tuple(rows), folds, f"{k_neighbors}-NN (Euclidean)", method.value, tuple(ranking))


class Benchmark(NamedTuple):
    data: FeatureMatrix
    target: Target
    relevant: frozenset[int]


def correlated_groups(n_relevant: int, n_duplicates_per_relevant: int) -> list[tuple[int, ...]]:
    """Column indices of each relevant feature followed by its duplicates."""
    groups = []
    for r in range(n_relevant):
        start = n_relevant + r * n_duplicates_per_relevant
        groups.append((r, *range(start, start + n_duplicates_per_relevant)))
    return groups


def synthetic_benchmark(
    n_relevant: int,
    n_noise: int,
    n_duplicates_per_relevant: int = 0,
    correlation: float = 0.0,
    M: int = 200,
    seed: int = 0,
) -> Benchmark:
    """Two-class data with known relevant columns.

    Column layout: relevant features, then their noisy copies (grouped per
    relevant feature, see :func:`correlated_groups`), then pure noise. The
    label is 1 where the relevant features sum to a positive value. With
    no relevant features the labels are fair coin flips.
    """
    if not 0.0 <= correlation < 1.0:
        raise StructNetError(f"correlation must lie in [0, 1), got {correlation}")
    if M < 10:
        raise StructNetError(f"M must be >= 10, got {M}")
    if min(n_relevant, n_noise, n_duplicates_per_relevant) < 0:
        raise StructNetError("feature counts must be non-negative")
    n_dup = n_relevant * n_duplicates_per_relevant
    if n_relevant + n_dup + n_noise < 1:
        raise StructNetError("benchmark needs at least one feature")

    rng = np.random.default_rng(seed)
    rel = rng.standard_normal((M, n_relevant))
    dup = np.empty((M, n_dup))
    for r in range(n_relevant):
        for d in range(n_duplicates_per_relevant):
            e = rng.standard_normal(M)
            dup[:, r * n_duplicates_per_relevant + d] = (
                rel[:, r] * correlation + e * np.sqrt(1.0 - correlation**2)
            )
    noise = rng.standard_normal((M, n_noise))
    if n_relevant:
        labels = (rel.sum(axis=1) > 0).astype(np.int64)
    else:
        labels = rng.integers(0, 2, M)
    # both classes must be present; resample labels deterministically if not
    while labels.min() == labels.max():
        labels = rng.integers(0, 2, M)

    names = (
        [f"rel{r}" for r in range(n_relevant)]
        + [f"dup{r}_{d}" for r in range(n_relevant) for d in range(n_duplicates_per_relevant)]
        + [f"noise{j}" for j in range(n_noise)]
    )
    data = FeatureMatrix(np.hstack([rel, dup, noise]), tuple(names))
    return Benchmark(data, Target(TargetKind.DISCRETE, labels=labels), frozenset(range(n_relevant)))
