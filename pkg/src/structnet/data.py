"""Dataset containers, CSV ingestion, standardization and class-mean helpers."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DuplicateFeatureName,
    MissingValue,
    StructNetError,
    TargetNotFound,
    TooFewSamples,
)


class TargetKind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class FeatureMatrix:
    """M samples x N features, stored sample-major.

    ``design`` gives the feature-major N x M view used by the regression.
    """

    values: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise StructNetError(f"feature matrix must be 2-D, got shape {values.shape}")
        if values.shape[0] < 2:
            raise TooFewSamples(f"need at least 2 samples, got {values.shape[0]}")
        if values.shape[1] < 1:
            raise StructNetError("need at least 1 feature")
        if not np.all(np.isfinite(values)):
            raise MissingValue("feature matrix contains NaN or infinite entries")
        names = tuple(str(n) for n in self.feature_names)
        if len(names) != values.shape[1]:
            raise StructNetError(
                f"{len(names)} feature names for {values.shape[1]} columns"
            )
        if len(set(names)) != len(names):
            raise DuplicateFeatureName(f"duplicate feature names in {names}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_names", names)

    @property
    def M(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]

    @property
    def design(self) -> np.ndarray:
        return self.values.T

    def column(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def subset(self, indices: Sequence[int]) -> "FeatureMatrix":
        idx = list(indices)
        return FeatureMatrix(self.values[:, idx], tuple(self.feature_names[i] for i in idx))

    @classmethod
    def from_array(cls, values, feature_names: Sequence[str] | None = None) -> "FeatureMatrix":
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if feature_names is None:
            feature_names = [f"f{i}" for i in range(values.shape[1])]
        return cls(values, tuple(feature_names))


@dataclass(frozen=True)
class Target:
    kind: TargetKind
    continuous_values: np.ndarray | None = None
    labels: np.ndarray | None = None
    class_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        kind = TargetKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is TargetKind.CONTINUOUS:
            if self.continuous_values is None:
                raise StructNetError("continuous target needs values")
            v = np.array(self.continuous_values, dtype=float).ravel()
            if not np.all(np.isfinite(v)):
                raise MissingValue("target contains NaN or infinite entries")
            v.setflags(write=False)
            object.__setattr__(self, "continuous_values", v)
        else:
            if self.labels is None:
                raise StructNetError("discrete target needs labels")
            lab = np.array(self.labels).ravel()
            if lab.size and not np.issubdtype(lab.dtype, np.integer):
                as_int = lab.astype(np.int64)
                if not np.array_equal(as_int, lab):
                    raise StructNetError("class labels must be integers")
                lab = as_int
            lab = lab.astype(np.int64)
            C = int(lab.max()) + 1 if lab.size else 0
            if lab.size and lab.min() < 0:
                raise StructNetError("class ids must be non-negative")
            if C < 2:
                raise StructNetError("a discrete target needs at least 2 classes")
            if np.any(np.bincount(lab, minlength=C) == 0):
                raise StructNetError("class ids must be contiguous 0..C-1 with no empty class")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)
            names = tuple(self.class_names) or tuple(str(c) for c in range(C))
            object.__setattr__(self, "class_names", names)

    @property
    def M(self) -> int:
        return len(self.values)

    @property
    def C(self) -> int | None:
        if self.kind is TargetKind.DISCRETE:
            return int(self.labels.max()) + 1
        return None

    @property
    def values(self) -> np.ndarray:
        """Numeric view: raw reals, or class ids cast to float."""
        if self.kind is TargetKind.CONTINUOUS:
            return self.continuous_values
        return self.labels.astype(float)

    @classmethod
    def continuous(cls, values) -> "Target":
        return cls(TargetKind.CONTINUOUS, continuous_values=values)

    @classmethod
    def discrete(cls, labels) -> "Target":
        """Encode arbitrary labels to contiguous ids by first appearance."""
        ids, names = encode_labels(labels)
        return cls(TargetKind.DISCRETE, labels=ids, class_names=names)


def encode_labels(raw) -> tuple[np.ndarray, tuple[str, ...]]:
    mapping: dict = {}
    ids = []
    for item in raw:
        key = item.item() if isinstance(item, np.generic) else item
        if key not in mapping:
            mapping[key] = len(mapping)
        ids.append(mapping[key])
    return np.asarray(ids, dtype=np.int64), tuple(str(k) for k in mapping)


@dataclass(frozen=True)
class StandardizationRecord:
    means: np.ndarray
    std_devs: np.ndarray
    applied: bool


def _parse_float(cell: str, row: int, col: str) -> float:
    text = cell.strip()
    if not text:
        raise MissingValue(f"empty cell at data row {row}, column {col!r}")
    try:
        x = float(text)
    except ValueError:
        raise MissingValue(f"unparsable cell {text!r} at data row {row}, column {col!r}") from None
    if not math.isfinite(x):
        raise MissingValue(f"non-finite cell {text!r} at data row {row}, column {col!r}")
    return x


def load_csv(path, target_column: str | int, target_kind: TargetKind | str):
    """Read a CSV with one header row into ``(FeatureMatrix, Target)``.

    ``target_column`` is a header name, or an integer column index. The
    target column is excluded from the features. Discrete targets are
    encoded to 0..C-1 in first-appearance order.
    """
    target_kind = TargetKind(target_kind)
    with open(Path(path), newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise TooFewSamples(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]

    if isinstance(target_column, str) and target_column in header:
        t_idx = header.index(target_column)
    elif isinstance(target_column, int) or (
        isinstance(target_column, str) and target_column.lstrip("-").isdigit()
    ):
        t_idx = int(target_column)
        if not -len(header) <= t_idx < len(header):
            raise TargetNotFound(f"target column index {t_idx} out of range")
        t_idx %= len(header)
    else:
        raise TargetNotFound(f"target column {target_column!r} not in header {header}")

    seen = set()
    for name in header:
        if name in seen:
            raise DuplicateFeatureName(f"duplicate column name {name!r}")
        seen.add(name)
    if len(body) < 2:
        raise TooFewSamples(f"need at least 2 samples, got {len(body)}")

    feat_cols = [j for j in range(len(header)) if j != t_idx]
    values = np.empty((len(body), len(feat_cols)))
    raw_target = []
    for r, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise MissingValue(f"data row {r} has {len(row)} cells, expected {len(header)}")
        for k, j in enumerate(feat_cols):
            values[r - 1, k] = _parse_float(row[j], r, header[j])
        cell = row[t_idx].strip()
        if not cell:
            raise MissingValue(f"empty target cell at data row {r}")
        raw_target.append(cell)

    data = FeatureMatrix(values, tuple(header[j] for j in feat_cols))
    if target_kind is TargetKind.CONTINUOUS:
        y = [_parse_float(c, r, header[t_idx]) for r, c in enumerate(raw_target, start=1)]
        return data, Target.continuous(y)
    return data, Target.discrete(raw_target)


def write_csv(path, data: FeatureMatrix, target: Target | None = None, target_name: str = "target"):
    """Inverse of :func:`load_csv`; floats printed with 17 significant digits."""
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = list(data.feature_names)
        if target is not None:
            header.append(target_name)
        w.writerow(header)
        for a in range(data.M):
            row = [format(float(x), ".17g") for x in data.values[a]]
            if target is not None:
                if target.kind is TargetKind.CONTINUOUS:
                    row.append(format(float(target.continuous_values[a]), ".17g"))
                else:
                    row.append(target.class_names[target.labels[a]])
            w.writerow(row)


def standardize(m: FeatureMatrix) -> tuple[FeatureMatrix, StandardizationRecord]:
    """Center each column and divide by its population standard deviation.

    Constant columns become all zeros and are recorded with std 0.
    """
    X = m.values
    mu = X.mean(axis=0)
    centered = X - mu
    sd = np.sqrt(np.mean(centered**2, axis=0))
    # relative guard: a column whose spread is pure round-off counts as constant
    scale = np.maximum(np.abs(mu), 1.0)
    constant = sd <= 1e-14 * scale
    sd = np.where(constant, 0.0, sd)
    out = np.where(constant, 0.0, centered / np.where(constant, 1.0, sd))
    return FeatureMatrix(out, m.feature_names), StandardizationRecord(mu, sd, True)


def is_standardized(m: FeatureMatrix, tol: float = 1e-8) -> bool:
    X = m.values
    M = X.shape[0]
    mu = X.sum(axis=0) / M
    if np.any(np.abs(mu) > tol):
        return False
    var = np.einsum("ij,ij->j", X, X) / M - mu * mu
    return bool(np.all((np.abs(var - 1) <= 2 * tol) | (var <= tol * tol)))


def class_means(feature, target: Target) -> np.ndarray:
    """Replace every sample by the mean of its class (per-sample class mean)."""
    if target.kind is not TargetKind.DISCRETE:
        raise StructNetError("class_means needs a discrete target")
    f = np.asarray(feature, dtype=float)
    lab = target.labels
    C = target.C
    sums = np.bincount(lab, weights=f, minlength=C)
    counts = np.bincount(lab, minlength=C)
    return (sums / counts)[lab]


def class_means_matrix(values, target: Target) -> np.ndarray:
    """:func:`class_means` applied to every column of an M x N matrix."""
    X = np.asarray(values, dtype=float)
    lab = target.labels
    C = target.C
    sums = np.zeros((C, X.shape[1]))
    np.add.at(sums, lab, X)
    return (sums / np.bincount(lab, minlength=C)[:, None])[lab]
