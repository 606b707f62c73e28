"""Entropy, Jensen-Shannon divergence and the pairwise interaction matrix W."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from ._parallel import ordered_map
from .data import FeatureMatrix, Target, TargetKind, class_means_matrix, is_standardized
from .errors import InvalidDistribution, LengthMismatch, VertexCountMismatch
from .graphs import (
    FeatureGraph,
    build_feature_graph,
    build_target_graph_discrete,
    strength_distributions,
)

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def _check_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise InvalidDistribution("empty distribution")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidDistribution("distribution has negative or non-finite entries")
    if abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistribution(f"distribution sums to {p.sum()!r}, not 1")
    return p


def _entropy(p: np.ndarray) -> float:
    return float(entr(p).sum())


def _jsd(p: np.ndarray, q: np.ndarray, hp: float, hq: float) -> float:
    # (hp + hq) keeps the result bit-symmetric in p and q
    d = _entropy(0.5 * (p + q)) - 0.5 * (hp + hq)
    if d < 0.0 and d > -1e-12:
        d = 0.0
    # round-off can push disjoint-support pairs a hair above the ln 2 ceiling
    return min(d, LN2)


def shannon_entropy(p) -> float:
    """Entropy in nats, ``-sum p ln p`` with ``0 ln 0 = 0``."""
    return _entropy(_check_distribution(p))


def jsd(p, q) -> float:
    """Jensen-Shannon divergence in nats, bounded by ln 2."""
    p = _check_distribution(p)
    q = _check_distribution(q)
    if p.shape != q.shape:
        raise LengthMismatch(f"distributions of length {p.size} and {q.size}")
    return _jsd(p, q, _entropy(p), _entropy(q))


def similarity(p, q) -> float:
    """``exp(-JSD)``, which lies in [0.5, 1]."""
    return math.exp(-jsd(p, q))


def relevance(g_i: FeatureGraph, g_j: FeatureGraph, target_i: FeatureGraph, target_j: FeatureGraph) -> float:
    """Pair score (I_S(g_i, t_i) + I_S(g_j, t_j)) / I_S(g_i, g_j), in [1, 4].

    For a continuous target pass the same target graph twice.
    """
    sizes = {g_i.M, g_j.M, target_i.M, target_j.M}
    if len(sizes) != 1:
        raise VertexCountMismatch(f"graphs have differing vertex counts {sorted(sizes)}")
    num = similarity(g_i.distribution, target_i.distribution) + similarity(
        g_j.distribution, target_j.distribution
    )
    return num / similarity(g_i.distribution, g_j.distribution)


@dataclass(frozen=True)
class InteractionMatrix:
    w: np.ndarray
    per_feature_target_similarity: np.ndarray
    feature_names: tuple[str, ...] = ()

    @property
    def N(self) -> int:
        return self.w.shape[0]

    def to_json(self) -> str:
        payload = {
            "features": list(self.feature_names),
            "w": self.w.tolist(),
        }
        return json.dumps(payload, indent=2)

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(self.feature_names))
        for row in self.w.tolist():
            w.writerow([format(x, ".17g") for x in row])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(self.to_csv())

    @classmethod
    def read_csv(cls, path) -> "InteractionMatrix":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        w = np.array([[float(x) for x in r] for r in rows[1:]])
        return cls(w, np.full(w.shape[0], np.nan), tuple(rows[0]))


def feature_graphs(data: FeatureMatrix, target: Target) -> tuple[list[FeatureGraph], list[FeatureGraph]]:
    """Per-feature graphs and their matching target graphs."""
    graphs = [build_feature_graph(data.column(i)) for i in range(data.N)]
    if target.kind is TargetKind.CONTINUOUS:
        shared = build_feature_graph(target.continuous_values)
        targets = [shared] * data.N
    else:
        targets = [build_target_graph_discrete(data.column(i), target) for i in range(data.N)]
    return graphs, targets


def graph_distributions(data: FeatureMatrix, target: Target) -> tuple[np.ndarray, np.ndarray]:
    """M x N feature and target graph distributions, without the M x M weight matrices.

    For a continuous target the second array is a single shared column.
    """
    if target.kind is TargetKind.CONTINUOUS:
        # one pass over [features | y] so a feature equal to y gets a bit-identical distribution
        both = strength_distributions(np.column_stack([data.values, target.continuous_values]))
        P = both[:, :-1]
        Q = both[:, -1:]
    else:
        P = strength_distributions(data.values)
        Q = strength_distributions(class_means_matrix(data.values, target))
    return P, Q


def build_interaction_matrix(
    data: FeatureMatrix,
    target: Target,
    zero_diagonal: bool = False,
    graphs: tuple[list[FeatureGraph], list[FeatureGraph]] | None = None,
) -> InteractionMatrix:
    """Pairwise informativeness matrix W over all feature pairs (diagonal included).

    Graph distributions and their entropies are computed once per feature
    (pass ``graphs`` to reuse already-built graphs);
    each of the N(N+1)/2 entries is then computed independently, so the
    threaded and sequential paths give bit-identical results.
    """
    if target.M != data.M:
        raise VertexCountMismatch(f"target has {target.M} samples, data has {data.M}")
    if not is_standardized(data):
        logger.warning("building W on unstandardized features")

    if graphs is not None:
        P = np.column_stack([g.distribution for g in graphs[0]])
        Q = np.column_stack([t.distribution for t in graphs[1]])
    else:
        P, Q = graph_distributions(data, target)
    N = data.N
    # one entropy pass over [P | Q | (P+Q)/2]; Q may be a broadcast single column
    Q = np.broadcast_to(Q, P.shape)
    H = entr(np.hstack([P, Q, 0.5 * (P + Q)])).sum(axis=0)
    HP = H[:N]
    jsd_target = H[2 * N :] - 0.5 * (HP + H[N : 2 * N])
    target_sim = np.exp(-np.maximum(jsd_target, 0.0))
    P = list(P.T)
    HP = HP.tolist()
    ts = target_sim.tolist()

    def row(i: int) -> list[float]:
        out = []
        for j in range(i, N):
            mutual = 1.0 if j == i else math.exp(-_jsd(P[i], P[j], HP[i], HP[j]))
            out.append((ts[i] + ts[j]) / mutual)
        return out

    rows = ordered_map(row, range(N), work=N * N * data.M / 2)
    w = np.empty((N, N))
    for i, vals in enumerate(rows):
        w[i, i:] = vals
        w[i:, i] = vals
    if zero_diagonal:
        np.fill_diagonal(w, 0.0)
    return InteractionMatrix(w, target_sim, data.feature_names)
