"""Command-line front end.

Commands
--------
values            semivalue scores (scores.json, marginals.json)
robustness        R_p curves from a config or an existing scores.json
correlate         rank agreement between utilities or between two score files
surrogate-check   exact vs affine-surrogate ranking discordance
synth             write a synthetic dataset CSV
init-config       write a configuration with every default filled in

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 input/output error. Failures print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .config import default_config, public_config, resolve_config
from .dataset import make_synthetic, save_csv
from .errors import DegenerateSignatureError, SemirobustError
from .io import read_json, scores_from_document, write_json
from .pipeline import (across_file_pairs, correlation_document, robustness_document,
                       rp_curve_rows, run_surrogate_check, run_values, values_documents,
                       within_file_pairs)
from .svg import line_chart, signature_scatter


def _common(p: argparse.ArgumentParser, config_required=False):
    p.add_argument("--config", type=Path, required=config_required, help="run configuration (JSON)")
    p.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int, help="global seed (overrides the config)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads for permutation walks (default: CPU count)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="csv also writes tabular copies of the results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semirobust", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("values", help="compute semivalue scores")
    _common(p, config_required=True)
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("robustness", help="R_p per semivalue and p")
    _common(p)
    p.add_argument("--scores", type=Path, help="reuse an existing scores.json")
    p.add_argument("--utilities", nargs="+", help="subset of base utilities for the signature")
    p.add_argument("--svg", action="store_true", help="also write rp_curve.svg and "
                   "signature_scatter.svg")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("correlate", help="Kendall/Spearman/Pearson and top-k stability")
    _common(p)
    p.add_argument("--scores", type=Path, required=True)
    p.add_argument("--against", type=Path, help="second scores.json to compare column-wise")
    p.add_argument("--utilities", nargs="+", help="utilities to pair within one file")
    p.add_argument("--k", type=int, nargs="+", help="top-k sizes (overrides the config)")

    p = sub.add_parser("surrogate-check", help="discordance of affine surrogate rankings")
    _common(p, config_required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--out", type=Path, required=True, help="CSV path")
    p.add_argument("--n-rows", type=int, default=150)
    p.add_argument("--n-features", type=int, default=2)
    p.add_argument("--task-kind", choices=("binary", "multiclass", "regression"), default="binary")
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--n-classes", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("init-config", help="write a fully resolved example configuration")
    p.add_argument("--out", type=Path, required=True, help="JSON path")
    p.add_argument("--data", type=Path, help="dataset CSV to reference (default: synthetic)")
    return parser


def _load_cfg(args):
    if args.config is None:
        return default_config(seed=args.seed, output_dir=args.out)
    return resolve_config(read_json(args.config), seed=args.seed, output_dir=args.out)


def _outdir(cfg) -> Path:
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path: Path, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def _say(args, msg):
    if not getattr(args, "quiet", False):
        print(msg, file=sys.stderr)


def _compute_values(args, cfg):
    out = _outdir(cfg)
    write_json(out / "config.resolved.json", public_config(cfg))

    def progress(m, r):
        _say(args, f"  {m} permutations, max Gelman-Rubin {r:.4f}")

    run = run_values(cfg, threads=max(1, args.threads), progress=progress)
    scores_doc, marg_doc = values_documents(run)
    write_json(out / "scores.json", scores_doc)
    write_json(out / "marginals.json", marg_doc)
    if args.format == "csv":
        for sm in run.scores:
            rows = [["point_id", *sm.utility_names]]
            rows += [[pid, *map(repr, map(float, r))] for pid, r in zip(sm.point_ids, sm.scores)]
            _write_csv(out / f"scores_{_slug(sm.weights_label)}.csv", rows)
    return run.scores, out


def _slug(label: str) -> str:
    return label.replace("(", "_").replace(")", "").replace(",", "_")


def cmd_values(args) -> int:
    cfg = _load_cfg(args)
    _, out = _compute_values(args, cfg)
    _say(args, f"wrote {out / 'scores.json'} and {out / 'marginals.json'}")
    return 0


def cmd_robustness(args) -> int:
    cfg = _load_cfg(args)
    if args.scores:
        scores = scores_from_document(read_json(args.scores))
        out = _outdir(cfg)
    else:
        if args.config is None:
            raise SemirobustError("robustness needs --config or --scores")
        scores, out = _compute_values(args, cfg)
    doc = robustness_document(scores, cfg["robustness"], args.utilities)
    write_json(out / "robustness.json", doc)
    rows = rp_curve_rows(doc)
    _write_csv(out / "rp_curve.csv", rows)
    if args.format == "csv":
        for sm in scores:
            _write_csv(out / f"signature_{_slug(sm.weights_label)}.csv",
                       [["point_id", *sm.utility_names]]
                       + [[pid, *map(repr, map(float, r))]
                          for pid, r in zip(sm.point_ids, sm.scores)])
    if args.svg:
        labels = rows[0][1:]
        series = {lab: [float(r[i + 1]) if r[i + 1] != "" else None for r in rows[1:]]
                  for i, lab in enumerate(labels)}
        (out / "rp_curve.svg").write_text(
            line_chart(series, doc["p"], "Mean p-robustness", "p", "R_p"), encoding="utf-8")
        if len(doc["utilities"]) == 2:
            cols = [list(scores[0].utility_names).index(u) for u in doc["utilities"]]
            panels = {sm.weights_label: sm.scores[:, cols] for sm in scores}
            (out / "signature_scatter.svg").write_text(
                signature_scatter(panels, doc["utilities"]), encoding="utf-8")
    _say(args, f"wrote {out / 'robustness.json'} and {out / 'rp_curve.csv'}")
    return 0


def cmd_correlate(args) -> int:
    cfg = _load_cfg(args)
    out = _outdir(cfg)
    a = scores_from_document(read_json(args.scores))
    if args.against:
        pairs = across_file_pairs(a, scores_from_document(read_json(args.against)))
    else:
        pairs = within_file_pairs(a, args.utilities)
    doc = correlation_document(pairs, args.k or cfg["correlate"]["k"])
    write_json(out / "correlations.json", doc)
    if args.format == "csv":
        rows = [["a", "b", "kendall_tau_b", "spearman", "pearson"]]
        rows += [[e["a"], e["b"], e["kendall_tau_b"], e["spearman"], e["pearson"]]
                 for e in doc["pairs"]]
        _write_csv(out / "correlations.csv", rows)
    return 0


def cmd_surrogate_check(args) -> int:
    cfg = _load_cfg(args)
    out = _outdir(cfg)
    write_json(out / "config.resolved.json", public_config(cfg))
    write_json(out / "surrogate_report.json", run_surrogate_check(cfg, max(1, args.threads)))
    return 0


def cmd_synth(args) -> int:
    ds = make_synthetic(args.n_rows, args.n_features, args.task_kind, args.seed, args.noise,
                        args.n_classes)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_csv(ds, args.out)
    return 0


def cmd_init_config(args) -> int:
    data = {"path": str(args.data)} if args.data else {
        "synthetic": {"n_rows": 60}, "n_train": 40, "n_test": 20}
    cfg = resolve_config({"data": data})
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_json(args.out, public_config(cfg))
    return 0


COMMANDS = {
    "values": cmd_values,
    "robustness": cmd_robustness,
    "correlate": cmd_correlate,
    "surrogate-check": cmd_surrogate_check,
    "synth": cmd_synth,
    "init-config": cmd_init_config,
}


def _fail(kind: str, message: str, code: int, **extra) -> int:
    print(json.dumps({"error": kind, "message": message, "exit_code": code, **extra}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DegenerateSignatureError as exc:
        return _fail(type(exc).__name__, str(exc), exc.exit_code,
                     tied_pairs=[list(t) for t in exc.tied_pairs])
    except SemirobustError as exc:
        return _fail(type(exc).__name__, str(exc), exc.exit_code)
    except OSError as exc:
        return _fail("IOError", str(exc), 4)


if __name__ == "__main__":
    sys.exit(main())
