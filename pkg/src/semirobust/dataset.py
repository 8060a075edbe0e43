"""Tabular datasets, train/test splits and a synthetic generator.

The row index of a loaded CSV is the identity of a data point everywhere
downstream: scores, signatures and rankings all refer to it.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DatasetError


class TaskKind(str, enum.Enum):
    BINARY = "binary"
    MULTICLASS = "multiclass"
    REGRESSION = "regression"


@dataclass(frozen=True)
class Dataset:
    """Labelled points; immutable once constructed.

    Parameters
    ----------
    features : ndarray of shape (n_rows, d)
    labels : ndarray of shape (n_rows,)
        ``{0, 1}`` for binary tasks, ``{0, ..., C-1}`` for multiclass,
        arbitrary reals for regression.
    task_kind : TaskKind
    feature_names : tuple of str, optional
    """

    features: np.ndarray
    labels: np.ndarray
    task_kind: TaskKind
    feature_names: tuple = ()

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        y = np.array(self.labels, dtype=float).reshape(-1)
        kind = TaskKind(self.task_kind)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DatasetError(f"features must be a non-empty 2-D matrix, got shape {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise DatasetError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DatasetError("missing or non-finite values are not allowed")
        _check_label_domain(y, kind)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "task_kind", kind)
        names = tuple(self.feature_names) or tuple(f"x{i + 1}" for i in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DatasetError("feature_names length does not match feature width")
        object.__setattr__(self, "feature_names", names)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int | None:
        if self.task_kind is TaskKind.REGRESSION:
            return None
        if self.task_kind is TaskKind.BINARY:
            return 2
        return int(self.labels.max()) + 1

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(self.features[idx], self.labels[idx], self.task_kind, self.feature_names)


@dataclass(frozen=True)
class Split:
    train_indices: np.ndarray
    test_indices: np.ndarray

    def __post_init__(self):
        tr = np.array(self.train_indices, dtype=int).reshape(-1)
        te = np.array(self.test_indices, dtype=int).reshape(-1)
        if tr.size == 0 or te.size == 0:
            raise ConfigError("train and test index sets must be nonempty")
        tr.setflags(write=False)
        te.setflags(write=False)
        object.__setattr__(self, "train_indices", tr)
        object.__setattr__(self, "test_indices", te)

    @property
    def disjoint(self) -> bool:
        return np.intersect1d(self.train_indices, self.test_indices).size == 0


def _check_label_domain(y: np.ndarray, kind: TaskKind) -> None:
    if kind is TaskKind.REGRESSION:
        return
    if not np.all(y == np.round(y)):
        raise DatasetError(f"{kind.value} labels must be integers")
    if kind is TaskKind.BINARY:
        bad = y[(y != 0) & (y != 1)]
        if bad.size:
            raise DatasetError(f"label outside {{0,1}}: {bad[0]:g}")
    elif np.any(y < 0):
        raise DatasetError(f"multiclass labels must be in 0..K-1, found {y.min():g}")


def _parse_cell(text: str, row: int, column: str) -> float:
    s = text.strip()
    if s == "":
        raise DatasetError(f"missing value at row {row}, column {column!r}")
    try:
        value = float(s)
    except ValueError:
        raise DatasetError(f"non-numeric cell {s!r} at row {row}, column {column!r}") from None
    if not math.isfinite(value):
        raise DatasetError(f"missing or non-finite value {s!r} at row {row}, column {column!r}")
    return value


def load_csv(path, label_column: str = "label", task_kind="binary") -> Dataset:
    """Load a header-first, comma-separated UTF-8 file.

    All non-label columns are features, in file order.
    """
    path = Path(path)
    kind = TaskKind(task_kind)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DatasetError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if label_column not in header:
            raise DatasetError(f"{path}: missing column {label_column!r}")
        label_pos = header.index(label_column)
        feat_pos = [i for i in range(len(header)) if i != label_pos]
        if not feat_pos:
            raise DatasetError(f"{path}: no feature columns")
        rows, labels = [], []
        for r, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise DatasetError(f"{path}: row {r} has {len(record)} cells, header has {len(header)}")
            rows.append([_parse_cell(record[i], r, header[i]) for i in feat_pos])
            labels.append(_parse_cell(record[label_pos], r, label_column))
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return Dataset(np.array(rows), np.array(labels), kind, tuple(header[i] for i in feat_pos))


def save_csv(dataset: Dataset, path, label_column: str = "label") -> None:
    # repr() of a float round-trips exactly
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [label_column])
        for x, y in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in x] + [repr(float(y))])


def make_split(dataset: Dataset, n_train: int, n_test: int, seed: int) -> Split:
    """Draw disjoint train/test index sets; a pure function of (n_rows, sizes, seed)."""
    if n_train < 1 or n_test < 1:
        raise ConfigError("n_train and n_test must be positive")
    if n_train + n_test > dataset.n_rows:
        raise ConfigError(
            f"n_train + n_test = {n_train + n_test} exceeds the {dataset.n_rows} available rows"
        )
    order = np.random.default_rng(seed).permutation(dataset.n_rows)
    return Split(order[:n_train], order[n_train:n_train + n_test])


def standardize(dataset: Dataset, split: Split) -> Dataset:
    """Z-score every feature with statistics from the training rows only."""
    X_train = dataset.features[split.train_indices]
    mu = X_train.mean(axis=0)
    sd = X_train.std(axis=0)
    sd[sd == 0] = 1.0
    return Dataset((dataset.features - mu) / sd, dataset.labels, dataset.task_kind,
                   dataset.feature_names)


def make_synthetic(n_rows: int, n_features: int = 2, task_kind="binary", seed: int = 0,
                   noise: float = 1.0, n_classes: int = 3) -> Dataset:
    """Gaussian features with labels from a noisy linear score.

    Binary labels threshold the score at zero, multiclass labels bin it at
    quantiles, and regression targets are the score itself.
    """
    kind = TaskKind(task_kind)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_rows, n_features))
    coef = rng.standard_normal(n_features)
    score = X @ coef + noise * rng.standard_normal(n_rows)
    if kind is TaskKind.BINARY:
        y = (score > 0).astype(float)
    elif kind is TaskKind.MULTICLASS:
        edges = np.quantile(score, np.linspace(0, 1, n_classes + 1)[1:-1])
        y = np.searchsorted(edges, score).astype(float)
    else:
        y = score
    return Dataset(X, y, kind)
