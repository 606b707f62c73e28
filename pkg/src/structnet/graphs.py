"""Complete weighted graphs over the samples of one feature (or target)."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .data import Target, class_means
from .errors import StructNetError


@dataclass(frozen=True)
class FeatureGraph:
    """Edge weights between sample-vertices plus the vertex distribution."""

    weights: np.ndarray
    distribution: np.ndarray

    @property
    def M(self) -> int:
        return self.distribution.shape[0]


def vertex_distribution(weights) -> np.ndarray:
    """Normalized vertex strength; uniform when every strength is zero."""
    W = np.asarray(weights, dtype=float)
    strength = W.sum(axis=1)
    total = strength.sum()
    if total <= 0.0:
        return np.full(W.shape[0], 1.0 / W.shape[0])
    return strength / total


def strength_distributions(columns) -> np.ndarray:
    """Vertex distributions of the complete |a - b| graph of every column.

    Column j of the result equals ``build_feature_graph(columns[:, j]).distribution``
    but is computed in O(M log M) without forming the M x M weights: with
    x sorted ascending, the strength of x_k is
    ``k*x_k - sum(x[:k]) + sum(x[k+1:]) - (M-1-k)*x_k``.
    """
    F = np.asarray(columns, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    M, N = F.shape
    magnitude = np.max(np.abs(F), axis=0)
    F = F - F.mean(axis=0)
    order = np.argsort(F, axis=0, kind="stable")
    cols = np.arange(N)
    x = F[order, cols]
    csum = np.cumsum(x, axis=0)
    prefix = csum - x
    suffix = csum[-1] - csum
    k = np.arange(M)[:, None]
    s_sorted = np.maximum((k * x - prefix) + (suffix - (M - 1 - k) * x), 0.0)
    strength = np.empty_like(s_sorted)
    strength[order, cols] = s_sorted
    total = strength.sum(axis=0)
    # spread at round-off level (e.g. class means of a constant column) counts as flat
    flat = (total <= 0.0) | (x[-1] - x[0] <= 1e-12 * magnitude)
    out = strength / np.where(flat, 1.0, total)
    out[:, flat] = 1.0 / M
    return out


def strength_distribution(values) -> np.ndarray:
    return strength_distributions(np.asarray(values, dtype=float).ravel())[:, 0]


def build_feature_graph(feature) -> FeatureGraph:
    f = np.asarray(feature, dtype=float).ravel()
    if f.size < 2:
        raise StructNetError(f"a feature graph needs at least 2 samples, got {f.size}")
    if not np.all(np.isfinite(f)):
        raise StructNetError("feature contains non-finite values")
    # |a - b| is exactly symmetric in IEEE arithmetic and zero on the diagonal
    weights = np.abs(f[:, None] - f[None, :])
    weights.setflags(write=False)
    p = vertex_distribution(weights)
    p.setflags(write=False)
    return FeatureGraph(weights, p)


def build_target_graph_continuous(y) -> FeatureGraph:
    return build_feature_graph(y)


def build_target_graph_discrete(feature, target: Target) -> FeatureGraph:
    return build_feature_graph(class_means(feature, target))


def dump_weights_csv(path, graph: FeatureGraph) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in graph.weights:
            w.writerow([format(float(x), ".17g") for x in row])
