"""The fixed learning algorithm: subset of training points in, model out.

Three learners are provided. ``logistic`` (binary) and ``softmax``
(multiclass) minimise an L2-regularised cross-entropy by full-batch gradient
descent from a seeded N(0, 1) start; ``ridge`` solves the regularised normal
equations in closed form. Every learner maps the empty subset to the
all-zero model so that the utility of the empty coalition is defined.

The feature matrix is augmented with a trailing column of ones, so the
weight vector is laid out as ``[coef_1, ..., coef_d, intercept]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError


class LearnerKind(str, enum.Enum):
    LOGISTIC = "logistic"
    SOFTMAX = "softmax"
    RIDGE = "ridge"


@dataclass(frozen=True)
class LearnerConfig:
    """Hyper-parameters of a learner.

    Parameters
    ----------
    kind : LearnerKind
    l2_lambda : float
        Strength of the L2 penalty. For the gradient-descent learners the
        objective is ``mean_loss + l2_lambda / (2 m) * ||w||^2`` with ``m``
        the subset size; for ridge it is added to the Gram matrix.
    max_iters : int
    step_size : float
        Initial step. It is halved whenever a step would increase the loss,
        which makes the loss sequence non-increasing.
    init_seed : int
    n_classes : int
        Only used by ``softmax``; subsets may miss classes, so the width of
        the output layer cannot be inferred from the labels.
    """

    kind: LearnerKind = LearnerKind.LOGISTIC
    l2_lambda: float = 1.0
    max_iters: int = 100
    step_size: float = 1.0
    init_seed: int = 0
    n_classes: int = 2

    def __post_init__(self):
        object.__setattr__(self, "kind", LearnerKind(self.kind))
        if not (self.l2_lambda >= 0 and math.isfinite(self.l2_lambda)):
            raise ConfigError(f"l2_lambda must be a finite value >= 0, got {self.l2_lambda}")
        if int(self.max_iters) < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.step_size > 0:
            raise ConfigError(f"step_size must be > 0, got {self.step_size}")
        if self.kind is LearnerKind.SOFTMAX and int(self.n_classes) < 2:
            raise ConfigError("softmax needs n_classes >= 2")


@dataclass(frozen=True)
class ModelParams:
    """Trained weights.

    ``weights`` has shape ``(d + 1,)`` for logistic and ridge models and
    ``(d + 1, n_classes)`` for softmax models. The last row is the intercept.
    """

    weights: np.ndarray
    learner_kind: LearnerKind
    loss_history: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if not np.all(np.isfinite(w)):
            raise NumericError("model weights are not finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "learner_kind", LearnerKind(self.learner_kind))

    @property
    def n_features(self) -> int:
        return self.weights.shape[0] - 1


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def _zero_model(d: int, config: LearnerConfig) -> ModelParams:
    shape = (d + 1, config.n_classes) if config.kind is LearnerKind.SOFTMAX else (d + 1,)
    return ModelParams(np.zeros(shape), config.kind)


def _logistic_loss(Xa, y, w, penalty):
    z = Xa @ w
    # mean of log(1 + e^z) - y z, written to avoid overflow
    nll = np.mean(np.logaddexp(0.0, z) - y * z)
    return nll + penalty * float(w @ w), z


def _softmax_loss(Xa, Y, W, penalty):
    Z = Xa @ W
    lse = np.logaddexp.reduce(Z, axis=1)
    nll = np.mean(lse - np.sum(Y * Z, axis=1))
    return nll + penalty * float(np.sum(W * W)), Z, lse


def _gradient_descent(loss_grad, w0, config):
    """Minimise with a step that is halved on any loss increase."""
    w = w0
    loss, grad = loss_grad(w)
    history = [loss]
    step = config.step_size
    for _ in range(int(config.max_iters)):
        for _ in range(60):
            cand = w - step * grad
            cand_loss, cand_grad = loss_grad(cand)
            if cand_loss <= loss:
                break
            step *= 0.5
        else:
            break
        w, loss, grad = cand, cand_loss, cand_grad
        history.append(loss)
    return w, history


def _train_logistic(X, y, config):
    m, d = X.shape
    Xa = _augment(X)
    penalty = config.l2_lambda / (2.0 * m)

    def loss_grad(w):
        loss, z = _logistic_loss(Xa, y, w, penalty)
        p = _sigmoid(z)
        return loss, Xa.T @ (p - y) / m + 2.0 * penalty * w

    w0 = np.random.default_rng(config.init_seed).standard_normal(d + 1)
    return _gradient_descent(loss_grad, w0, config)


def _train_softmax(X, y, config):
    m, d = X.shape
    C = int(config.n_classes)
    Xa = _augment(X)
    Y = np.zeros((m, C))
    Y[np.arange(m), y.astype(int)] = 1.0
    penalty = config.l2_lambda / (2.0 * m)

    def loss_grad(W):
        loss, Z, lse = _softmax_loss(Xa, Y, W, penalty)
        P = np.exp(Z - lse[:, None])
        return loss, Xa.T @ (P - Y) / m + 2.0 * penalty * W

    W0 = np.random.default_rng(config.init_seed).standard_normal((d + 1, C))
    return _gradient_descent(loss_grad, W0, config)


def _train_ridge(X, y, config):
    Xa = _augment(X)
    gram = Xa.T @ Xa + config.l2_lambda * np.eye(Xa.shape[1])
    if config.l2_lambda == 0 and np.linalg.matrix_rank(gram) < gram.shape[0]:
        raise NumericError("singular normal equations; use l2_lambda > 0")
    try:
        return np.linalg.solve(gram, Xa.T @ y)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"ridge solve failed: {exc}") from exc


def train(features, labels, config: LearnerConfig, n_features: int | None = None) -> ModelParams:
    """Fit the configured learner on a (possibly empty) subset.

    Parameters
    ----------
    features : array_like of shape (m, d)
    labels : array_like of shape (m,)
    config : LearnerConfig
    n_features : int, optional
        Feature width, needed only when ``features`` is empty and carries
        no shape information.

    Returns
    -------
    ModelParams
        Bit-identical for identical inputs.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float).reshape(-1)
    if X.size == 0:
        d = n_features if n_features is not None else (X.shape[1] if X.ndim == 2 else None)
        if d is None:
            raise ConfigError("cannot infer feature width of an empty subset")
        return _zero_model(int(d), config)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ConfigError(f"features {X.shape} and labels {y.shape} do not match")
    kind = config.kind
    if kind is LearnerKind.LOGISTIC:
        if np.any((y != 0) & (y != 1)):
            raise ConfigError("logistic learner needs 0/1 labels")
        w, hist = _train_logistic(X, y, config)
        return ModelParams(w, kind, tuple(hist))
    if kind is LearnerKind.SOFTMAX:
        if np.any((y < 0) | (y >= config.n_classes) | (y != np.round(y))):
            raise ConfigError(f"softmax labels must be in 0..{config.n_classes - 1}")
        w, hist = _train_softmax(X, y, config)
        return ModelParams(w, kind, tuple(hist))
    return ModelParams(_train_ridge(X, y, config), kind)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


_P_LO = np.finfo(float).tiny
_P_HI = 1.0 - np.finfo(float).epsneg


def predict_scores(model: ModelParams, features) -> np.ndarray:
    """Model outputs on ``features``.

    Logistic models return probabilities strictly inside (0, 1), softmax
    models an ``(m, C)`` matrix of class probabilities, and ridge models
    unbounded real predictions.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != model.n_features:
        raise ConfigError(f"model expects {model.n_features} features, got {X.shape[1]}")
    z = _augment(X) @ model.weights
    if model.learner_kind is LearnerKind.RIDGE:
        return z
    if model.learner_kind is LearnerKind.LOGISTIC:
        return np.clip(_sigmoid(z), _P_LO, _P_HI)
    lse = np.logaddexp.reduce(z, axis=1)
    return np.exp(z - lse[:, None])


def predict_labels(model: ModelParams, features, threshold: float = 0.5) -> np.ndarray:
    """Hard labels: ``prob > threshold`` for logistic, argmax for softmax."""
    scores = predict_scores(model, features)
    if model.learner_kind is LearnerKind.LOGISTIC:
        return (scores > threshold).astype(float)
    if model.learner_kind is LearnerKind.SOFTMAX:
        return np.argmax(scores, axis=1).astype(float)
    raise ConfigError("ridge models have no labels")


def calibrate_threshold(probabilities, positive_rate: float) -> float:
    """Cut-off that labels a ``positive_rate`` share of inputs as positive.

    Uses the lower empirical quantile: with ``s`` sorted ascending the
    threshold is ``s[ceil((1 - p) m) - 1]``, so ``prob > threshold`` marks
    ``round(m p)`` inputs positive up to ties. ``p = 1`` returns the value
    just below the minimum so that every input is positive.
    """
    s = np.sort(np.asarray(probabilities, dtype=float).reshape(-1))
    m = s.size
    if m == 0:
        raise ConfigError("cannot calibrate a threshold on an empty vector")
    p = min(max(float(positive_rate), 0.0), 1.0)
    if p >= 1.0:
        return float(np.nextafter(s[0], -np.inf))
    # the small slack keeps (1 - p) * m = 7.000000000000001 from rounding up
    idx = math.ceil((1.0 - p) * m - 1e-9) - 1
    return float(s[min(max(idx, 0), m - 1)])
