"""Run configuration: one JSON document with every default written out.

``resolve_config`` fills in defaults, applies command-line overrides and
validates everything that can be checked before any model is trained.
"""

from __future__ import annotations

import copy
import math

from .dataset import TaskKind
from .errors import ConfigError
from .learners import LearnerKind
from .semivalue.montecarlo import McConfig
from .semivalue.weights import parse_weight_spec
from .utilities import MetricId

DEFAULT_CONFIG = {
    "seed": 0,
    "data": None,
    "game": None,
    "learner": {
        "kind": None,
        "l2_lambda": 1.0,
        "max_iters": 100,
        "step_size": 1.0,
        "init_seed": None,
    },
    "utilities": ["lambda_stat", "gamma_stat"],
    "threshold_source": "train",
    "semivalues": ["shapley", "beta(4,1)", "banzhaf"],
    "estimator": "mc",
    "exact_cap": 20,
    "mc": {
        "min_perms": 100,
        "max_perms": 5000,
        "gr_threshold": 1.05,
        "gr_check_every": 100,
        "n_chains": 2,
        "trunc_tol": 1e-8,
        "trunc_window": 10,
        "truncate": True,
        "seed": None,
    },
    "robustness": {
        "p": [1, 2, 5, 10],
        "method": "auto",
        "epsilon": 0.02,
        "delta": 0.05,
        "grid_resolution": 1000000,
        "sorted_resolution": 20000,
        "seed": None,
    },
    "correlate": {"k": [5, 10]},
    "surrogate": {"utilities": ["accuracy", "f_beta:1", "jaccard"]},
    "output_dir": "out",
}

DATA_DEFAULTS = {
    "path": None,
    "synthetic": None,
    "label_column": "label",
    "task_kind": "binary",
    "n_train": 100,
    "n_test": 50,
    "split_seed": None,
    "standardize": False,
}

SYNTHETIC_DEFAULTS = {"n_rows": 150, "n_features": 2, "noise": 1.0, "n_classes": 3, "seed": None}

GAME_DEFAULTS = {"kind": "saturating", "values": None, "utility_names": None}


def _merge(defaults: dict, given: dict, where: str) -> dict:
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        if isinstance(out.get(key), dict) and isinstance(value, dict):
            out[key] = _merge(out[key], value, f"{where}.{key}")
        else:
            out[key] = copy.deepcopy(value)
    return out


def _int(value, name, lo=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{name} must be >= {lo}, got {value}")
    return int(value)


def resolve_config(raw: dict | None = None, seed: int | None = None,
                   output_dir: str | None = None) -> dict:
    """Complete and validate a configuration.

    Seeds left as ``null`` inherit the global ``seed``. The returned
    document is self-contained: re-resolving it is the identity.
    """
    if raw is not None and not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    cfg = _merge(DEFAULT_CONFIG, raw or {}, "config")
    if seed is not None:
        cfg["seed"] = seed
    if output_dir is not None:
        cfg["output_dir"] = str(output_dir)
    g = _int(cfg["seed"], "seed")
    cfg["seed"] = g

    if (cfg["data"] is None) == (cfg["game"] is None):
        raise ConfigError("give exactly one of 'data' (a dataset) or 'game' (a synthetic game)")

    if cfg["data"] is not None:
        data = _merge(DATA_DEFAULTS, cfg["data"], "data")
        if (data["path"] is None) == (data["synthetic"] is None):
            raise ConfigError("data needs exactly one of 'path' or 'synthetic'")
        kind = TaskKind(data["task_kind"])
        data["n_train"] = _int(data["n_train"], "data.n_train", 1)
        data["n_test"] = _int(data["n_test"], "data.n_test", 1)
        data["split_seed"] = g if data["split_seed"] is None else _int(data["split_seed"], "split_seed")
        if data["synthetic"] is not None:
            syn = _merge(SYNTHETIC_DEFAULTS, data["synthetic"], "data.synthetic")
            syn["seed"] = g if syn["seed"] is None else _int(syn["seed"], "synthetic.seed")
            syn["n_rows"] = _int(syn["n_rows"], "synthetic.n_rows", 1)
            syn["n_features"] = _int(syn["n_features"], "synthetic.n_features", 1)
            data["synthetic"] = syn
        cfg["data"] = data
        n_players = data["n_train"]
        learner = cfg["learner"]
        default_kind = {TaskKind.BINARY: "logistic", TaskKind.MULTICLASS: "softmax",
                        TaskKind.REGRESSION: "ridge"}[kind]
        learner["kind"] = LearnerKind(learner["kind"] or default_kind).value
        learner["init_seed"] = g if learner["init_seed"] is None else _int(learner["init_seed"],
                                                                             "init_seed")
        metrics = [MetricId.parse(u) for u in cfg["utilities"]]
        cfg["utilities"] = [str(m) for m in metrics]
        if cfg["threshold_source"] not in ("train", "test"):
            raise ConfigError("threshold_source must be 'train' or 'test'")
    else:
        game = _merge(GAME_DEFAULTS, cfg["game"], "game")
        if game["kind"] not in ("additive", "saturating"):
            raise ConfigError(f"game.kind must be 'additive' or 'saturating', got {game['kind']!r}")
        vals = game["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError("game.values must be a nonempty list (one entry per player)")
        rows = [v if isinstance(v, list) else [v] for v in vals]
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ConfigError("game.values rows must have equal length")
        K = widths.pop()
        game["values"] = rows
        names = game["utility_names"] or [f"u{k + 1}" for k in range(K)]
        if len(names) != K:
            raise ConfigError("game.utility_names length must match the value width")
        game["utility_names"] = list(names)
        cfg["game"] = game
        cfg["utilities"] = list(names)
        n_players = len(rows)

    if not cfg["utilities"]:
        raise ConfigError("at least one base utility is required")
    if not cfg["semivalues"]:
        raise ConfigError("at least one semivalue is required")
    for s in cfg["semivalues"]:
        parse_weight_spec(s)
    if cfg["estimator"] not in ("mc", "exact"):
        raise ConfigError("estimator must be 'mc' or 'exact'")
    cfg["exact_cap"] = _int(cfg["exact_cap"], "exact_cap", 1)
    if cfg["estimator"] == "exact" and n_players > cfg["exact_cap"]:
        raise ConfigError(f"exact estimator capped at {cfg['exact_cap']} players, got {n_players}")

    mc = cfg["mc"]
    mc["seed"] = g if mc["seed"] is None else _int(mc["seed"], "mc.seed")
    McConfig(**mc)

    rob = cfg["robustness"]
    rob["seed"] = g if rob["seed"] is None else _int(rob["seed"], "robustness.seed")
    if rob["method"] not in ("auto", "closed_form", "grid", "sphere_mc"):
        raise ConfigError(f"unknown robustness method {rob['method']!r}")
    n_pairs = math.comb(n_players, 2)
    ps = [_int(p, "robustness.p", 1) for p in rob["p"]]
    bad = [p for p in ps if p >= n_pairs]
    if bad:
        raise ConfigError(f"p values {bad} must be < C(n_train, 2) = {n_pairs}")
    rob["p"] = ps
    cfg["correlate"]["k"] = [_int(k, "correlate.k", 1) for k in cfg["correlate"]["k"]]
    cfg["surrogate"]["utilities"] = [str(MetricId.parse(u)) for u in cfg["surrogate"]["utilities"]]
    cfg["_n_players"] = n_players
    return cfg


def default_config(seed: int | None = None, output_dir: str | None = None) -> dict:
    """Defaults for commands that read existing score files and need no data or game."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if seed is not None:
        cfg["seed"] = _int(seed, "seed")
    if output_dir is not None:
        cfg["output_dir"] = str(output_dir)
    for section in ("mc", "robustness"):
        cfg[section]["seed"] = cfg["seed"]
    return cfg


def public_config(cfg: dict) -> dict:
    """The resolved configuration without internal bookkeeping keys."""
    return {k: v for k, v in cfg.items() if not k.startswith("_")}
