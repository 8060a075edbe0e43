"""Performance metrics and the linear-fractional view of binary metrics.

Every metric is oriented higher-is-better: regression errors are negated.
Binary metrics that are ratios of affine functions of

    lambda = (1/m) #{pred = 1 and y = 1}     (true-positive rate)
    gamma  = (1/m) #{pred = 1}               (positive-prediction rate)

can be written ``(c0 + c1 lambda + c2 gamma) / (d0 + d1 lambda + d2 gamma)``
where the coefficients depend on the test positive rate ``pi``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError


class MetricKind(str, enum.Enum):
    ACCURACY = "accuracy"
    F_BETA = "f_beta"
    RECALL = "recall"
    JACCARD = "jaccard"
    AM_MEASURE = "am_measure"
    NEG_LOG_LOSS = "neg_log_loss"
    LAMBDA_STAT = "lambda_stat"
    GAMMA_STAT = "gamma_stat"
    MSE_NEG = "mse_neg"
    MAE_NEG = "mae_neg"
    R2 = "r2"
    MACRO_RECALL = "macro_recall"
    WEIGHTED_RECALL = "weighted_recall"
    MACRO_PRECISION = "macro_precision"
    MACRO_F1 = "macro_f1"
    CLASSWISE_RECALL = "classwise_recall"
    CLASSWISE_PRECISION = "classwise_precision"


BINARY_METRICS = frozenset({
    MetricKind.ACCURACY, MetricKind.F_BETA, MetricKind.RECALL, MetricKind.JACCARD,
    MetricKind.AM_MEASURE, MetricKind.NEG_LOG_LOSS, MetricKind.LAMBDA_STAT,
    MetricKind.GAMMA_STAT,
})
REGRESSION_METRICS = frozenset({MetricKind.MSE_NEG, MetricKind.MAE_NEG, MetricKind.R2})
MULTICLASS_METRICS = frozenset({
    MetricKind.ACCURACY, MetricKind.MACRO_RECALL, MetricKind.WEIGHTED_RECALL,
    MetricKind.MACRO_PRECISION, MetricKind.MACRO_F1, MetricKind.CLASSWISE_RECALL,
    MetricKind.CLASSWISE_PRECISION,
})
LINFRAC_METRICS = frozenset({
    MetricKind.ACCURACY, MetricKind.F_BETA, MetricKind.JACCARD, MetricKind.AM_MEASURE,
    MetricKind.RECALL, MetricKind.LAMBDA_STAT, MetricKind.GAMMA_STAT,
})


@dataclass(frozen=True)
class MetricId:
    """A metric plus its parameter.

    ``beta`` applies to ``f_beta`` and ``k`` to the class-wise metrics.
    The string form is ``"kind"`` or ``"kind:param"``, e.g. ``"f_beta:1"``
    or ``"classwise_recall:2"``; ``"f1"`` is accepted for ``f_beta:1``.
    """

    kind: MetricKind
    beta: float | None = None
    k: int | None = None

    def __post_init__(self):
        kind = MetricKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is MetricKind.F_BETA:
            beta = 1.0 if self.beta is None else float(self.beta)
            if not beta > 0:
                raise ConfigError(f"f_beta needs beta > 0, got {beta}")
            object.__setattr__(self, "beta", beta)
        if kind in (MetricKind.CLASSWISE_RECALL, MetricKind.CLASSWISE_PRECISION):
            if self.k is None or int(self.k) < 0:
                raise ConfigError(f"{kind.value} needs a class index k >= 0")
            object.__setattr__(self, "k", int(self.k))

    @classmethod
    def parse(cls, text) -> "MetricId":
        if isinstance(text, MetricId):
            return text
        s = str(text).strip().lower()
        if s == "f1":
            return cls(MetricKind.F_BETA, beta=1.0)
        name, _, arg = s.partition(":")
        try:
            kind = MetricKind(name)
        except ValueError:
            raise ConfigError(f"unknown metric {text!r}") from None
        if kind is MetricKind.F_BETA:
            return cls(kind, beta=float(arg) if arg else 1.0)
        if kind in (MetricKind.CLASSWISE_RECALL, MetricKind.CLASSWISE_PRECISION):
            if not arg:
                raise ConfigError(f"{name} needs a class index, e.g. {name}:0")
            return cls(kind, k=int(arg))
        if arg:
            raise ConfigError(f"metric {name!r} takes no parameter")
        return cls(kind)

    def __str__(self) -> str:
        if self.kind is MetricKind.F_BETA:
            return f"f_beta:{self.beta:g}"
        if self.k is not None:
            return f"{self.kind.value}:{self.k}"
        return self.kind.value


@dataclass(frozen=True)
class LinFracCoeffs:
    c0: float
    c1: float
    c2: float
    d0: float
    d1: float
    d2: float

    def numerator(self, lam, gam):
        return self.c0 + self.c1 * lam + self.c2 * gam

    def denominator(self, lam, gam):
        return self.d0 + self.d1 * lam + self.d2 * gam


@dataclass(frozen=True)
class AffineSurrogate:
    intercept: float
    coef_lambda: float
    coef_gamma: float

    def __call__(self, lam, gam):
        return self.intercept + self.coef_lambda * lam + self.coef_gamma * gam


def lambda_gamma(predicted_labels, true_labels) -> tuple[float, float]:
    """Return ``(lambda, gamma)`` for 0/1 predictions against 0/1 labels."""
    pred = np.asarray(predicted_labels).reshape(-1)
    y = np.asarray(true_labels).reshape(-1)
    if pred.shape != y.shape:
        raise ConfigError(f"length mismatch: {pred.size} predictions, {y.size} labels")
    if pred.size == 0:
        raise ConfigError("empty test set")
    m = pred.size
    pos = pred == 1
    return float(np.count_nonzero(pos & (y == 1))) / m, float(np.count_nonzero(pos)) / m


def linfrac_coeffs(metric, pi: float) -> LinFracCoeffs:
    """Coefficients of a linear-fractional binary metric at positive rate ``pi``.

    The AM-measure row is derived from ``(TPR + TNR) / 2`` with
    ``TPR = lambda / pi`` and ``TNR = (1 - pi - gamma + lambda) / (1 - pi)``.
    """
    metric = MetricId.parse(metric)
    kind = metric.kind
    if kind not in LINFRAC_METRICS:
        raise ConfigError(f"{metric} is not a linear-fractional metric")
    pi = float(pi)
    if not 0.0 < pi < 1.0:
        raise ConfigError(f"positive rate must lie in (0, 1), got {pi}")
    if kind is MetricKind.ACCURACY:
        return LinFracCoeffs(1.0 - pi, 2.0, -1.0, 1.0, 0.0, 0.0)
    if kind is MetricKind.F_BETA:
        b2 = metric.beta ** 2
        return LinFracCoeffs(0.0, 1.0 + b2, 0.0, b2 * pi, 0.0, 1.0)
    if kind is MetricKind.JACCARD:
        return LinFracCoeffs(0.0, 1.0, 0.0, pi, -1.0, 1.0)
    if kind is MetricKind.AM_MEASURE:
        return LinFracCoeffs(0.5, 0.5 / pi + 0.5 / (1.0 - pi), -0.5 / (1.0 - pi), 1.0, 0.0, 0.0)
    if kind is MetricKind.RECALL:
        return LinFracCoeffs(0.0, 1.0, 0.0, pi, 0.0, 0.0)
    if kind is MetricKind.LAMBDA_STAT:
        return LinFracCoeffs(0.0, 1.0, 0.0, 1.0, 0.0, 0.0)
    return LinFracCoeffs(0.0, 0.0, 1.0, 1.0, 0.0, 0.0)


def eval_linfrac(coeffs: LinFracCoeffs, lam: float, gam: float) -> float:
    den = coeffs.denominator(lam, gam)
    if den == 0:
        raise NumericError(f"zero denominator at lambda={lam}, gamma={gam}")
    return coeffs.numerator(lam, gam) / den


def affine_surrogate(coeffs: LinFracCoeffs) -> AffineSurrogate:
    """First-order expansion of the fraction around ``(lambda, gamma) = (0, 0)``."""
    c0, c1, c2, d0, d1, d2 = (coeffs.c0, coeffs.c1, coeffs.c2, coeffs.d0, coeffs.d1, coeffs.d2)
    if d0 == 0:
        raise NumericError("d0 = 0: no expansion around the origin")
    return AffineSurrogate(c0 / d0, (c1 * d0 - c0 * d1) / d0 ** 2, (c2 * d0 - c0 * d2) / d0 ** 2)


def _binary_from_counts(kind, metric, lam, gam, pi):
    if kind is MetricKind.LAMBDA_STAT:
        return lam
    if kind is MetricKind.GAMMA_STAT:
        return gam
    if kind is MetricKind.ACCURACY:
        return 1.0 - pi + 2.0 * lam - gam
    if kind is MetricKind.RECALL:
        return lam / pi if pi > 0 else 0.0
    if kind is MetricKind.F_BETA:
        b2 = metric.beta ** 2
        den = b2 * pi + gam
        return (1.0 + b2) * lam / den if den > 0 else 0.0
    if kind is MetricKind.JACCARD:
        den = pi - lam + gam
        return lam / den if den > 0 else 0.0
    # AM measure: mean of the true-positive and true-negative rates
    tpr = lam / pi if pi > 0 else 0.0
    tnr = (1.0 - pi - gam + lam) / (1.0 - pi) if pi < 1 else 0.0
    return 0.5 * (tpr + tnr)


def _per_class(pred, y, n_classes):
    labels = np.union1d(np.unique(y), np.unique(pred)).astype(int)
    if n_classes is not None:
        labels = labels[labels < n_classes]
    tp = np.array([np.count_nonzero((pred == c) & (y == c)) for c in labels], dtype=float)
    support = np.array([np.count_nonzero(y == c) for c in labels], dtype=float)
    predicted = np.array([np.count_nonzero(pred == c) for c in labels], dtype=float)
    return labels, tp, support, predicted


def _safe_div(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros_like(a)
    np.divide(a, b, out=out, where=b > 0)
    return out


def eval_metric(metric, predictions, true_labels, threshold: float | None = None,
                n_classes: int | None = None) -> float:
    """Evaluate a metric, higher is better.

    Parameters
    ----------
    metric : MetricId or str
    predictions : array_like
        Binary metrics take hard 0/1 labels, or probabilities when
        ``threshold`` is given (positive iff ``prob > threshold``).
        ``neg_log_loss`` always takes probabilities. Multiclass metrics take
        class ids or an ``(m, C)`` probability matrix. Regression metrics
        take real predictions.
    true_labels : array_like
    threshold : float, optional
    n_classes : int, optional

    Notes
    -----
    Ratios whose denominator is zero (F-score, precision or recall with no
    relevant items) evaluate to 0. Macro averages run over the classes that
    appear in either the labels or the predictions.
    """
    metric = MetricId.parse(metric)
    kind = metric.kind
    y = np.asarray(true_labels, dtype=float).reshape(-1)
    pred = np.asarray(predictions, dtype=float)
    if y.size == 0:
        raise ConfigError("empty test set")

    if kind in REGRESSION_METRICS:
        pred = pred.reshape(-1)
        _check_len(pred, y)
        resid = y - pred
        if kind is MetricKind.MSE_NEG:
            return -float(np.mean(resid ** 2))
        if kind is MetricKind.MAE_NEG:
            return -float(np.mean(np.abs(resid)))
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        if ss_tot == 0:
            raise NumericError("r2 undefined for zero-variance targets")
        return 1.0 - float(np.sum(resid ** 2)) / ss_tot

    multiclass = pred.ndim == 2 or kind in MULTICLASS_METRICS - {MetricKind.ACCURACY} or (
        n_classes is not None and n_classes > 2) or (
        kind is MetricKind.ACCURACY and threshold is None and (np.any(y > 1) or np.any(pred > 1)))
    if multiclass:
        if pred.ndim == 2:
            pred = np.argmax(pred, axis=1).astype(float)
        _check_len(pred, y)
        if kind is MetricKind.ACCURACY:
            return float(np.mean(pred == y))
        if kind not in MULTICLASS_METRICS:
            raise ConfigError(f"{metric} is not a multiclass metric")
        if kind in (MetricKind.CLASSWISE_RECALL, MetricKind.CLASSWISE_PRECISION):
            c = metric.k
            if n_classes is not None and c >= n_classes:
                raise ConfigError(f"class index {c} out of range for {n_classes} classes")
            tp = np.count_nonzero((pred == c) & (y == c))
            den = np.count_nonzero(y == c) if kind is MetricKind.CLASSWISE_RECALL \
                else np.count_nonzero(pred == c)
            return tp / den if den else 0.0
        _, tp, support, predicted = _per_class(pred, y, n_classes)
        recall = _safe_div(tp, support)
        precision = _safe_div(tp, predicted)
        if kind is MetricKind.MACRO_RECALL:
            return float(np.mean(recall))
        if kind is MetricKind.WEIGHTED_RECALL:
            return float(np.sum(support * recall) / y.size)
        if kind is MetricKind.MACRO_PRECISION:
            return float(np.mean(precision))
        return float(np.mean(_safe_div(2 * precision * recall, precision + recall)))

    pred = pred.reshape(-1)
    _check_len(pred, y)
    if kind is MetricKind.NEG_LOG_LOSS:
        p = np.clip(pred, 1e-15, 1 - 1e-15)
        return float(np.mean(y * np.log(p) + (1 - y) * np.log1p(-p)))
    if kind not in BINARY_METRICS:
        raise ConfigError(f"{metric} is not a binary metric")
    hard = (pred > threshold).astype(float) if threshold is not None else pred
    lam, gam = lambda_gamma(hard, y)
    return float(_binary_from_counts(kind, metric, lam, gam, float(np.mean(y == 1))))


def _check_len(pred, y):
    if pred.shape[0] != y.shape[0]:
        raise ConfigError(f"length mismatch: {pred.shape[0]} predictions, {y.shape[0]} labels")


def surrogate_discordance(scores_exact, scores_surrogate) -> float:
    """Share of the ``C(n, 2)`` pairs whose strict order is reversed."""
    a = np.asarray(scores_exact, dtype=float).reshape(-1)
    b = np.asarray(scores_surrogate, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise ConfigError("score vectors differ in length")
    n = a.size
    if n < 2:
        raise ConfigError("need at least two points")
    iu = np.triu_indices(n, 1)
    da = (a[:, None] - a[None, :])[iu]
    db = (b[:, None] - b[None, :])[iu]
    return float(np.count_nonzero(da * db < 0)) / math.comb(n, 2)
