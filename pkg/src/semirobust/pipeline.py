"""End-to-end runs driven by a resolved configuration."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, load_csv, make_split, make_synthetic, standardize
from .errors import ConfigError
from .geometry import build_signature, cut_partition, ranking_regions, robustness_rp
from .io import (CORRELATIONS_SCHEMA, ROBUSTNESS_SCHEMA, SURROGATE_SCHEMA, marginals_document,
                 scores_document)
from .learners import LearnerConfig
from .rankstats import kendall_tau_b, pearson, spearman, top_k_stability
from .semivalue import (AdditiveGame, FunctionGame, LearningGame, McConfig, SaturatingGame,
                        ScoreMatrix, exact_marginals, mc_semivalues, scores_from_marginals,
                        weights_from_spec)
from .semivalue.games import Game
from .utilities import (LINFRAC_METRICS, MetricId, affine_surrogate, eval_linfrac, linfrac_coeffs,
                        surrogate_discordance)


@dataclass
class ValuesRun:
    scores: list
    marginals_doc: dict
    estimator: str
    game: Game
    point_ids: tuple
    extra: dict = field(default_factory=dict)


def load_dataset(cfg: dict) -> Dataset:
    data = cfg["data"]
    if data["path"] is not None:
        return load_csv(data["path"], data["label_column"], data["task_kind"])
    syn = data["synthetic"]
    return make_synthetic(syn["n_rows"], syn["n_features"], data["task_kind"], syn["seed"],
                          syn["noise"], syn["n_classes"])


def learner_config(cfg: dict, dataset: Dataset) -> LearnerConfig:
    lc = cfg["learner"]
    return LearnerConfig(lc["kind"], lc["l2_lambda"], lc["max_iters"], lc["step_size"],
                         lc["init_seed"], dataset.n_classes or 2)


def build_game(cfg: dict, utilities=None) -> tuple[Game, tuple]:
    """The game to value and the dataset row id of each player."""
    if cfg["game"] is not None:
        g = cfg["game"]
        cls = AdditiveGame if g["kind"] == "additive" else SaturatingGame
        game = cls(np.asarray(g["values"], dtype=float), g["utility_names"])
        return game, tuple(range(game.n_players))
    dataset = load_dataset(cfg)
    data = cfg["data"]
    split = make_split(dataset, data["n_train"], data["n_test"], data["split_seed"])
    if data["standardize"]:
        dataset = standardize(dataset, split)
    game = LearningGame(dataset, split, learner_config(cfg, dataset),
                        utilities or cfg["utilities"], cfg["threshold_source"])
    return game, tuple(int(i) for i in split.train_indices)


def _estimate(cfg, game, point_ids, threads, progress=None):
    weights = [weights_from_spec(s, game.n_players) for s in cfg["semivalues"]]
    if cfg["estimator"] == "exact":
        marg = exact_marginals(game, cfg["exact_cap"])
        scores = [ScoreMatrix(scores_from_marginals(marg, w), w.label, game.utility_names, None,
                              point_ids) for w in weights]
        doc = marginals_document("exact", game.utility_names, point_ids, None, marg, None)
        return scores, doc, marg, {}
    res = mc_semivalues(game, weights, McConfig(**cfg["mc"]), threads=threads, progress=progress)
    st = res.store
    scores = [ScoreMatrix(s.scores, s.weights_label, s.utility_names, s.n_permutations, point_ids)
              for s in res.scores]
    doc = marginals_document("mc", game.utility_names, point_ids, st.count, st.mean_marginals(),
                             st.variance(), res.n_permutations, res.converged,
                             st.permutation_digest, res.gr_history)
    extra = {"converged": res.converged, "n_permutations": res.n_permutations,
             "mean_truncation": float(np.mean(res.truncation_points))}
    return scores, doc, st.mean_marginals(), extra


def run_values(cfg: dict, threads: int = 1, progress=None) -> ValuesRun:
    game, point_ids = build_game(cfg)
    scores, doc, marg, extra = _estimate(cfg, game, point_ids, threads, progress)
    extra["mean_marginals"] = marg
    return ValuesRun(scores, doc, cfg["estimator"], game, point_ids, extra)


def values_documents(run: ValuesRun) -> tuple[dict, dict]:
    return scores_document(run.scores, run.estimator), run.marginals_doc


def robustness_document(scores: list, rob: dict, utilities=None) -> dict:
    """R_p for every semivalue in ``scores`` and every ``p`` in ``rob["p"]``.

    ``utilities`` restricts the signature to a subset of the base utilities.
    A requested ``p`` that is not below ``C(n, 2)``, or exceeds the number
    of pairs that can swap (tied pairs never do), is reported as skipped.
    """
    names = list(scores[0].utility_names)
    cols = [names.index(u) for u in utilities] if utilities else list(range(len(names)))
    if len(cols) < 2:
        raise ConfigError("robustness needs at least two base utilities")
    used = [names[c] for c in cols]
    K = len(cols)
    method = rob["method"]
    if method == "auto":
        method = "closed_form" if K == 2 else "sphere_mc"
    out = {"schema": ROBUSTNESS_SCHEMA, "utilities": used, "method": method,
           "p": list(rob["p"]), "semivalues": {}}
    table = {}
    for sm in scores:
        sig = build_signature(ScoreMatrix(sm.scores[:, cols], sm.weights_label, tuple(used),
                                          sm.n_permutations, sm.point_ids))
        tied = sig.tied_pairs()
        entry = {"tied_pairs": [[sig.point_ids[i], sig.point_ids[j]] for i, j in tied]}
        if K == 2:
            entry["regions"] = ranking_regions(sig)
            max_p = cut_partition(sig).n_swappable_pairs
        else:
            max_p = math.comb(sig.n, 2) - len(tied)
        results = []
        for p in rob["p"]:
            if p >= math.comb(sig.n, 2):
                results.append({"p": p, "skipped": f"p must be < C(n, 2) = {math.comb(sig.n, 2)}"})
                continue
            if p > max_p:
                results.append({"p": p, "skipped": f"only {max_p} pairs can swap"})
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                rep = robustness_rp(sig, p, method, grid_resolution=rob["grid_resolution"],
                                    epsilon=rob["epsilon"], delta=rob["delta"], seed=rob["seed"],
                                    sorted_resolution=rob["sorted_resolution"] if K == 2 else None)
            d = rep.to_dict()
            d.pop("tied_pairs", None)
            results.append(d)
            table.setdefault(p, {})[sm.weights_label] = rep.r_p
        entry["results"] = results
        out["semivalues"][sm.weights_label] = entry
    best = {p: max(v, key=v.get) for p, v in table.items()}
    out["best_semivalue"] = best
    if any(s.weights_label == "banzhaf" for s in scores):
        out["banzhaf_is_max"] = {p: bool(table[p].get("banzhaf", -np.inf)
                                          >= max(table[p].values()))
                                 for p in table}
    return out


def rp_curve_rows(doc: dict) -> list:
    labels = list(doc["semivalues"])
    rows = [["p", *labels]]
    for p in doc["p"]:
        row = [p]
        for lab in labels:
            hit = [r for r in doc["semivalues"][lab]["results"] if r["p"] == p and "r_p" in r]
            row.append(repr(float(hit[0]["r_p"])) if hit else "")
        rows.append(row)
    return rows


def correlation_document(pairs: list, ks) -> dict:
    """``pairs`` holds ``(name_a, scores_a, name_b, scores_b)`` tuples."""
    out = {"schema": CORRELATIONS_SCHEMA, "k": list(ks), "pairs": []}
    for name_a, a, name_b, b in pairs:
        entry = {"a": name_a, "b": name_b}
        for key, fn in (("kendall_tau_b", kendall_tau_b), ("spearman", spearman),
                        ("pearson", pearson)):
            try:
                entry[key] = fn(a, b)
            except ArithmeticError as exc:
                entry[key] = None
                entry.setdefault("warnings", []).append(f"{key}: {exc}")
        entry["top_k"] = {k: top_k_stability(a, b, k) for k in ks if k <= len(a)}
        out["pairs"].append(entry)
    return out


def within_file_pairs(scores: list, utilities=None) -> list:
    pairs = []
    for sm in scores:
        names = utilities or list(sm.utility_names)
        for u, v in itertools.combinations(names, 2):
            pairs.append((f"{sm.weights_label}/{u}", sm.column(u),
                          f"{sm.weights_label}/{v}", sm.column(v)))
    return pairs


def across_file_pairs(scores_a: list, scores_b: list) -> list:
    by_b = {s.weights_label: s for s in scores_b}
    pairs = []
    for sa in scores_a:
        sb = by_b.get(sa.weights_label)
        if sb is None:
            continue
        if set(sa.point_ids) != set(sb.point_ids):
            raise ConfigError(f"point ids differ between the files for {sa.weights_label}")
        order = [sb.point_ids.index(i) for i in sa.point_ids]
        for u in sa.utility_names:
            if u in sb.utility_names:
                pairs.append((f"A:{sa.weights_label}/{u}", sa.column(u),
                              f"B:{sb.weights_label}/{u}", sb.column(u)[order]))
    if not pairs:
        raise ConfigError("the two score files share no semivalue/utility column")
    return pairs


def run_surrogate_check(cfg: dict, threads: int = 1) -> dict:
    """Compare rankings under each linear-fractional metric and its affine surrogate.

    Exact and surrogate values are evaluated per coalition on the same
    predictions, so both share one permutation pool.
    """
    if cfg["data"] is None or cfg["data"]["task_kind"] != "binary":
        raise ConfigError("surrogate-check needs a binary classification dataset")
    metrics = [MetricId.parse(u) for u in cfg["surrogate"]["utilities"]]
    for m in metrics:
        if m.kind not in LINFRAC_METRICS:
            raise ConfigError(f"{m} is not linear-fractional; no surrogate exists")
    base, point_ids = build_game(cfg, ["lambda_stat", "gamma_stat"])
    pi = base.test_positive_rate
    coeffs = [linfrac_coeffs(m, pi) for m in metrics]
    surr = [affine_surrogate(c) for c in coeffs]

    def _exact(c, lam, gam):
        return eval_linfrac(c, lam, gam) if c.denominator(lam, gam) != 0 else 0.0

    def fn(idx):
        lam, gam = base(idx)
        vals = []
        for c, s in zip(coeffs, surr):
            vals += [_exact(c, lam, gam), s(lam, gam)]
        return np.array(vals)

    names = [x for m in metrics for x in (f"{m}", f"{m}~affine")]
    game = FunctionGame(base.n_players, fn, names, cache=False)
    scores, _, _, extra = _estimate(cfg, game, point_ids, threads)
    report = {"schema": SURROGATE_SCHEMA, "test_positive_rate": pi, "metrics": {}}
    for m, c, s in zip(metrics, coeffs, surr):
        report["metrics"][str(m)] = {
            "coefficients": {"c": [c.c0, c.c1, c.c2], "d": [c.d0, c.d1, c.d2]},
            "surrogate": {"intercept": s.intercept, "coef_lambda": s.coef_lambda,
                          "coef_gamma": s.coef_gamma},
            "discordance": {sm.weights_label: surrogate_discordance(sm.column(str(m)),
                                                                    sm.column(f"{m}~affine"))
                            for sm in scores},
        }
    report["n_permutations"] = extra.get("n_permutations")
    return report
