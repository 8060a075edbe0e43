"""Cooperative games with vector-valued utilities.

A game maps a coalition (a set of player indices) to a length-``K`` vector,
one entry per base utility. Evaluating all ``K`` utilities in one call is
what makes sampling aligned: every utility sees the same trained model.
Results are memoised by coalition bitmask.
"""

from __future__ import annotations

import threading

import numpy as np

from ..dataset import Dataset, Split, TaskKind
from ..errors import ConfigError
from ..learners import LearnerConfig, LearnerKind, calibrate_threshold, predict_scores, train
from ..utilities import (BINARY_METRICS, MULTICLASS_METRICS, REGRESSION_METRICS, MetricId,
                         MetricKind, eval_metric)


def coalition_mask(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << int(i)
    return mask


class Game:
    """Base class. Subclasses implement :meth:`_evaluate`.

    Parameters
    ----------
    n_players : int
    utility_names : sequence of str
    cache : bool
        Memoise values by coalition. Reads are lock-free; inserts are
        serialised.
    """

    def __init__(self, n_players: int, utility_names, cache: bool = True):
        if n_players < 1:
            raise ConfigError("a game needs at least one player")
        self.n_players = int(n_players)
        self.utility_names = tuple(str(u) for u in utility_names)
        if not self.utility_names:
            raise ConfigError("a game needs at least one utility")
        self._cache = {} if cache else None
        self._lock = threading.Lock()
        self.n_evaluations = 0

    @property
    def n_utilities(self) -> int:
        return len(self.utility_names)

    def __call__(self, indices) -> np.ndarray:
        idx = np.asarray(sorted(int(i) for i in indices), dtype=int)
        if idx.size and (idx[0] < 0 or idx[-1] >= self.n_players):
            raise ConfigError(f"player index out of range 0..{self.n_players - 1}")
        if self._cache is None:
            return self._compute(idx)
        key = coalition_mask(idx)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        value = self._compute(idx)
        with self._lock:
            return self._cache.setdefault(key, value)

    def _compute(self, idx):
        value = np.asarray(self._evaluate(idx), dtype=float).reshape(self.n_utilities)
        value.setflags(write=False)
        with self._lock:
            self.n_evaluations += 1
        return value

    def _evaluate(self, idx: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def table(self) -> np.ndarray:
        """Utilities of every coalition, indexed by bitmask; shape ``(2**n, K)``."""
        n = self.n_players
        out = np.empty((1 << n, self.n_utilities))
        players = np.arange(n)
        for mask in range(1 << n):
            out[mask] = self(players[(mask >> players) & 1 == 1])
        return out


class TableGame(Game):
    """A game given by its full value table, shape ``(2**n,)`` or ``(2**n, K)``."""

    def __init__(self, table, utility_names=None):
        t = np.asarray(table, dtype=float)
        if t.ndim == 1:
            t = t[:, None]
        n = int(round(np.log2(t.shape[0])))
        if 1 << n != t.shape[0]:
            raise ConfigError("table length must be a power of two")
        names = utility_names or [f"u{k + 1}" for k in range(t.shape[1])]
        super().__init__(n, names, cache=False)
        self._table = t

    def _evaluate(self, idx):
        return self._table[coalition_mask(idx)]

    def table(self):
        return self._table.copy()


class AdditiveGame(Game):
    """``u_k(S) = sum_{i in S} v_ik``; every semivalue returns ``v`` exactly."""

    def __init__(self, values, utility_names=None):
        v = np.asarray(values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        names = utility_names or [f"u{k + 1}" for k in range(v.shape[1])]
        super().__init__(v.shape[0], names, cache=False)
        self.values = v

    def _evaluate(self, idx):
        return self.values[idx].sum(axis=0)


class SaturatingGame(Game):
    """Bounded, monotone, non-additive: ``u_k(S) = 1 - exp(-sum_{i in S} v_ik)``."""

    def __init__(self, values, utility_names=None):
        v = np.asarray(values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if np.any(v < 0):
            raise ConfigError("saturating game needs non-negative values")
        names = utility_names or [f"u{k + 1}" for k in range(v.shape[1])]
        super().__init__(v.shape[0], names, cache=False)
        self.values = v

    def _evaluate(self, idx):
        return -np.expm1(-self.values[idx].sum(axis=0))


class FunctionGame(Game):
    """Wrap ``fn(indices) -> array of length K``."""

    def __init__(self, n_players, fn, utility_names, cache=True):
        super().__init__(n_players, utility_names, cache=cache)
        self._fn = fn

    def _evaluate(self, idx):
        return self._fn(idx)


def _default_learner_kind(task: TaskKind) -> LearnerKind:
    return {TaskKind.BINARY: LearnerKind.LOGISTIC, TaskKind.MULTICLASS: LearnerKind.SOFTMAX,
            TaskKind.REGRESSION: LearnerKind.RIDGE}[task]


class LearningGame(Game):
    """Utility of a training subset = metrics of the model trained on it.

    Players are the training points of ``split`` in their split order, so
    player ``i`` is dataset row ``split.train_indices[i]``.

    Parameters
    ----------
    dataset : Dataset
    split : Split
    learner : LearnerConfig
    utilities : sequence of MetricId or str
        All are evaluated on the predictions of one trained model.
    threshold_source : {"train", "test"}
        Binary tasks only. The decision cut-off is the quantile of the
        coalition model's predicted probabilities at the training positive
        rate; ``"train"`` takes the quantile over the full training set and
        applies it to the test set, ``"test"`` takes it over the test
        predictions themselves (which pins the positive-prediction rate).
    """

    def __init__(self, dataset: Dataset, split: Split, learner: LearnerConfig, utilities,
                 threshold_source: str = "train", cache: bool = True):
        metrics = [MetricId.parse(u) for u in utilities]
        super().__init__(split.train_indices.size, [str(m) for m in metrics], cache=cache)
        task = dataset.task_kind
        allowed = {TaskKind.BINARY: BINARY_METRICS, TaskKind.MULTICLASS: MULTICLASS_METRICS,
                   TaskKind.REGRESSION: REGRESSION_METRICS}[task]
        for m in metrics:
            if m.kind not in allowed:
                raise ConfigError(f"metric {m} does not apply to a {task.value} task")
        if learner.kind is not _default_learner_kind(task):
            raise ConfigError(f"learner {learner.kind.value} does not fit a {task.value} task")
        if threshold_source not in ("train", "test"):
            raise ConfigError(f"threshold_source must be 'train' or 'test', got {threshold_source!r}")
        self.metrics = metrics
        self.task = task
        self.learner = learner
        self.threshold_source = threshold_source
        self.X_train = dataset.features[split.train_indices]
        self.y_train = dataset.labels[split.train_indices]
        self.X_test = dataset.features[split.test_indices]
        self.y_test = dataset.labels[split.test_indices]
        self.n_classes = dataset.n_classes
        self.positive_rate = float(np.mean(self.y_train == 1))
        if task is TaskKind.BINARY and not 0 < np.mean(self.y_test == 1) < 1:
            raise ConfigError("the test set must contain both classes")

    @property
    def test_positive_rate(self) -> float:
        return float(np.mean(self.y_test == 1))

    def model_outputs(self, idx):
        """Test-set predictions of the model trained on coalition ``idx``."""
        model = train(self.X_train[idx], self.y_train[idx], self.learner,
                      n_features=self.X_train.shape[1])
        scores = predict_scores(model, self.X_test)
        if self.task is not TaskKind.BINARY:
            return scores, None
        pool = predict_scores(model, self.X_train) if self.threshold_source == "train" else scores
        return scores, calibrate_threshold(pool, self.positive_rate)

    def _evaluate(self, idx):
        scores, threshold = self.model_outputs(idx)
        out = np.empty(len(self.metrics))
        for k, m in enumerate(self.metrics):
            if m.kind is MetricKind.NEG_LOG_LOSS:
                out[k] = eval_metric(m, scores, self.y_test)
            else:
                out[k] = eval_metric(m, scores, self.y_test, threshold=threshold,
                                     n_classes=self.n_classes)
        return out
