"""JSON documents exchanged between commands.

scores.json
    ``{"schema": "semirobust.scores/1", "estimator", "utilities": [names],
    "point_ids": [ids], "semivalues": {label: {"n_permutations": int|null,
    "scores": {point_id: {utility: score}}}}}``
marginals.json
    ``{"schema": "semirobust.marginals/1", "estimator", "utilities",
    "point_ids", "n_permutations", "converged", "permutation_digest",
    "gelman_rubin_history": [[m, max_R]], "sizes": [{"size": j,
    "count": [per point], "mean": [[per point, per utility]],
    "variance": [[...]]}]}`` where ``size`` is the coalition size ``j - 1``
    a point joins.
robustness.json
    ``{"schema": "semirobust.robustness/1", "utilities", "p": [..],
    "semivalues": {label: {"regions": {...}, "tied_pairs": [[i, j]],
    "results": [RobustnessReport]}}, "best_semivalue": {p: label},
    "banzhaf_is_max": {p: bool}}``
correlations.json
    ``{"schema": "semirobust.correlations/1", "k": [..], "pairs":
    [{"a", "b", "kendall_tau_b", "spearman", "pearson",
    "top_k": {k: {"overlap", "jaccard"}}}]}``

Point ids are written as JSON object keys, hence strings.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError, DatasetError
from .semivalue.exact import ScoreMatrix

SCORES_SCHEMA = "semirobust.scores/1"
MARGINALS_SCHEMA = "semirobust.marginals/1"
ROBUSTNESS_SCHEMA = "semirobust.robustness/1"
CORRELATIONS_SCHEMA = "semirobust.correlations/1"
SURROGATE_SCHEMA = "semirobust.surrogate/1"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(_clean(doc), indent=2) + "\n", encoding="utf-8")


def read_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def scores_document(scores: list, estimator: str) -> dict:
    first = scores[0]
    return {
        "schema": SCORES_SCHEMA,
        "estimator": estimator,
        "utilities": list(first.utility_names),
        "point_ids": list(first.point_ids),
        "semivalues": {
            s.weights_label: {
                "n_permutations": s.n_permutations,
                "scores": {str(pid): dict(zip(s.utility_names, map(float, row)))
                           for pid, row in zip(s.point_ids, s.scores)},
            }
            for s in scores
        },
    }


def scores_from_document(doc: dict) -> list:
    """Inverse of :func:`scores_document`; floats round-trip exactly."""
    if doc.get("schema") != SCORES_SCHEMA:
        raise ConfigError(f"not a scores document (schema {doc.get('schema')!r})")
    names = list(doc["utilities"])
    out = []
    for label, entry in doc["semivalues"].items():
        ids = list(entry["scores"].keys())
        rows = [[float(entry["scores"][i][u]) for u in names] for i in ids]
        out.append(ScoreMatrix(np.array(rows), label, tuple(names), entry.get("n_permutations"),
                               tuple(int(i) for i in ids)))
    return out


def marginals_document(estimator, utilities, point_ids, count, mean, variance,
                       n_permutations=None, converged=None, digest=None, gr_history=()) -> dict:
    n = mean.shape[0]
    return {
        "schema": MARGINALS_SCHEMA,
        "estimator": estimator,
        "utilities": list(utilities),
        "point_ids": list(point_ids),
        "n_permutations": n_permutations,
        "converged": converged,
        "permutation_digest": digest,
        "gelman_rubin_history": [list(h) for h in gr_history],
        "sizes": [
            {"size": j, "count": None if count is None else count[:, j].tolist(),
             "mean": mean[:, j, :].tolist(),
             "variance": None if variance is None else variance[:, j, :].tolist()}
            for j in range(n)
        ],
    }


def means_from_marginals_document(doc: dict) -> np.ndarray:
    if doc.get("schema") != MARGINALS_SCHEMA:
        raise ConfigError("not a marginals document")
    return np.stack([np.asarray(s["mean"], dtype=float) for s in doc["sizes"]], axis=1)
