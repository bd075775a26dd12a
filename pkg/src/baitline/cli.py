"""Command-line surface for the clickbait-detection pipeline.

Commands: ingest, split, featurize, train, predict, eval, ensemble (fit and
apply).  Exit codes: 0 success, 2 missing input file, 3 schema or validation
error, 4 incompatible checkpoint or model container, 1 unexpected failure.
Every command writes a resolved-config snapshot beside its outputs; the
``BAITLINE_SEED`` environment variable supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import config as cfg
from .classical import (
    SvmModel,
    load_rf,
    load_svm,
    save_rf,
    save_svm,
    train_random_forest,
    train_svm,
)
from .corpus import (
    Corpus,
    CorpusFormatError,
    Label,
    corpus_stats,
    label_from_clickbait_proba,
    load_corpus,
    load_split_manifest,
    save_corpus,
    split_by_source,
)
from .ensemble import EnsembleConfig, ensemble_predict, fit_weights
from .features import (
    FEATURE_NAMES,
    HeuristicTagger,
    Standardizer,
    export_features,
    feature_matrix,
    fit_standardizer,
)
from .metrics import (
    PredictionRow,
    evaluate,
    export_pr_curve,
    load_predictions,
    mcnemar,
    render_report,
    save_predictions,
    save_report,
)
from .neural.heads import EncoderHeadBundle, train_encoder_head
from .neural.lstm import BiLstmBundle, train_bilstm
from .neural.siamese import SiameseBundle, contrastive_predict, train_contrastive
from .tensor.checkpoint import CheckpointVersionError


def _default_seed() -> int:
    return int(os.environ.get(cfg.SEED_ENV_VAR, "0"))


def _add_common_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True, help="training corpus (json lines)")
    parser.add_argument("--out", required=True, help="output run directory")
    parser.add_argument("--profile", choices=cfg.PROFILES, default="full")
    parser.add_argument("--config", help="INI config file with per-family sections")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--epochs", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baitline", description="clickbait detection pipeline"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate a corpus and print statistics")
    p_ingest.add_argument("--corpus", required=True)
    p_ingest.add_argument("--stats", action="store_true", help="print token/sentence stats")

    p_split = sub.add_parser("split", help="source-separated train/test split")
    p_split.add_argument("--corpus", required=True)
    p_split.add_argument("--manifest", required=True, help="JSON source -> train|test map")
    p_split.add_argument("--out-train", required=True)
    p_split.add_argument("--out-test", required=True)

    p_feat = sub.add_parser("featurize", help="export the handcrafted feature matrix")
    p_feat.add_argument("--corpus", required=True)
    p_feat.add_argument("--out", required=True)
    p_feat.add_argument("--standardizer-out", help="also fit and save a standardizer")

    p_train = sub.add_parser("train", help="train one model family")
    p_train.add_argument("--model", required=True, choices=cfg.MODEL_FAMILIES)
    _add_common_train_flags(p_train)

    p_pred = sub.add_parser("predict", help="write a prediction file for a corpus")
    p_pred.add_argument("--model-dir", required=True)
    p_pred.add_argument("--corpus", required=True)
    p_pred.add_argument("--out", required=True)

    p_eval = sub.add_parser("eval", help="score a prediction file")
    p_eval.add_argument("--preds", required=True)
    p_eval.add_argument("--out-dir", required=True)
    p_eval.add_argument(
        "--compare", help="second prediction file for a McNemar significance test"
    )
    p_eval.add_argument("--compare-name", default="other")

    p_ens = sub.add_parser("ensemble", help="fit or apply weighted soft voting")
    ens_sub = p_ens.add_subparsers(dest="ensemble_command", required=True)
    p_fit = ens_sub.add_parser("fit", help="fit weights from validation predictions")
    p_fit.add_argument(
        "--preds", nargs="+", required=True, metavar="ID=FILE",
        help="per-model validation prediction files",
    )
    p_fit.add_argument("--out", required=True)
    p_fit.add_argument("--threshold", type=float, default=0.5)
    p_apply = ens_sub.add_parser("apply", help="combine aligned prediction files")
    p_apply.add_argument("--config", required=True)
    p_apply.add_argument("--preds", nargs="+", required=True, metavar="ID=FILE")
    p_apply.add_argument("--out", required=True)

    return parser


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    corpus = load_corpus(args.corpus)
    n_cb = corpus.count(Label.CLICKBAIT)
    n_ncb = corpus.count(Label.NON_CLICKBAIT)
    print(f"corpus {corpus.name}: {len(corpus)} articles "
          f"({n_cb} clickbait / {n_ncb} non-clickbait)")
    print(f"sources: {', '.join(sorted(corpus.sources()))}")
    if args.stats:
        stats = corpus_stats(corpus)
        print(f"tokens total: {stats.token_total}")
        print(f"avg title tokens: {stats.avg_title_tokens:.2f}")
        print(f"avg content tokens: {stats.avg_content_tokens:.2f}")
        print(f"avg sentences: {stats.avg_sentences:.2f}")
        print(f"sentence range: {stats.sentence_range[0]}..{stats.sentence_range[1]}")
        for source in sorted(stats.per_source_clickbait_ratio):
            ratio = stats.per_source_clickbait_ratio[source]
            print(f"clickbait ratio {source}: {ratio:.4f}")
    return 0


def cmd_split(args) -> int:
    corpus = load_corpus(args.corpus)
    train_sources, test_sources = load_split_manifest(args.manifest)
    train, test = split_by_source(corpus, train_sources, test_sources)
    save_corpus(train, args.out_train)
    save_corpus(test, args.out_test)
    for side, part in (("train", train), ("test", test)):
        n_cb = part.count(Label.CLICKBAIT) if part.is_labeled else 0
        n_ncb = part.count(Label.NON_CLICKBAIT) if part.is_labeled else 0
        print(f"{side}: {len(part)} articles ({n_cb} clickbait / {n_ncb} non-clickbait)")
    cfg.write_snapshot(
        str(args.out_train) + ".config.ini",
        {"split": {"corpus": args.corpus, "manifest": args.manifest}},
    )
    return 0


def cmd_featurize(args) -> int:
    corpus = load_corpus(args.corpus)
    matrix = feature_matrix(corpus.articles, HeuristicTagger())
    export_features(matrix, args.out, FEATURE_NAMES)
    if args.standardizer_out:
        fit_standardizer(matrix).save(args.standardizer_out)
    cfg.write_snapshot(
        str(args.out) + ".config.ini",
        {"featurize": {"corpus": args.corpus, "n_features": len(FEATURE_NAMES)}},
    )
    print(f"wrote {matrix.shape[0]} x {matrix.shape[1]} feature matrix to {args.out}")
    return 0


def _resolve_model_config(args, family: str):
    file_overrides = {}
    if args.config:
        sections = cfg.read_config_file(args.config)
        file_overrides = sections.get(family, {})
    flag_overrides: dict = {}
    if args.seed is not None:
        flag_overrides["seed"] = args.seed
    elif "seed" not in file_overrides:
        flag_overrides["seed"] = _default_seed()
    if args.epochs is not None:
        flag_overrides["epochs"] = args.epochs
    return cfg.build_model_config(family, args.profile, file_overrides, flag_overrides)


def cmd_train(args) -> int:
    corpus = load_corpus(args.corpus)
    family = args.model
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_config = _resolve_model_config(args, family)

    losses: list[float] = []
    if family in ("rf", "svm"):
        if not corpus.is_labeled:
            raise ValueError("training needs a labeled corpus")
        tagger = HeuristicTagger()
        X_raw = feature_matrix(corpus.articles, tagger)
        y = np.array([int(a.label) for a in corpus], dtype=np.int64)
        standardizer = fit_standardizer(X_raw)
        X = standardizer.apply(X_raw)
        standardizer.save(out_dir / "standardizer.json")
        if family == "rf":
            model = train_random_forest(X, y, model_config)
            save_rf(model, out_dir / "model.json")
            losses = [model.oob_score]
        else:
            model = train_svm(X, y, model_config)
            save_svm(model, out_dir / "model.json")
            losses = model.objective_by_epoch
    elif family == "bilstm":
        bundle = train_bilstm(corpus, model_config)
        bundle.save(out_dir)
        losses = bundle.train_losses
    elif family == "contrastive":
        bundle = train_contrastive(corpus, model_config)
        bundle.save(out_dir)
        losses = bundle.train_losses
    else:  # encoder-head
        bundle = train_encoder_head(corpus, model_config)
        bundle.save(out_dir)
        losses = bundle.train_losses

    with open(out_dir / "training.log", "w", encoding="utf-8") as fh:
        for epoch, value in enumerate(losses, start=1):
            fh.write(f"epoch {epoch}: {value!r}\n")
    snapshot = {
        "run": {
            "command": "train",
            "model": family,
            "corpus": args.corpus,
            "profile": args.profile,
        },
        family: cfg.config_as_dict(model_config),
    }
    cfg.write_snapshot(out_dir / "config.ini", snapshot)
    print(f"trained {family} on {len(corpus)} articles -> {out_dir}")
    return 0


def _load_run_family(model_dir: Path) -> str:
    snapshot = cfg.read_config_file(model_dir / "config.ini")
    try:
        return snapshot["run"]["model"]
    except KeyError:
        raise CorpusFormatError(f"{model_dir}: config.ini lacks a run/model entry") from None


def _predict_rows(model_dir: Path, corpus: Corpus) -> list[PredictionRow]:
    family = _load_run_family(model_dir)
    golds = [a.label for a in corpus]
    if family in ("rf", "svm"):
        standardizer = Standardizer.load(model_dir / "standardizer.json")
        X = standardizer.apply(feature_matrix(corpus.articles, HeuristicTagger()))
        if family == "rf":
            probs = load_rf(model_dir / "model.json").predict_clickbait_proba(X)
        else:
            model: SvmModel = load_svm(model_dir / "model.json")
            probs = model.predict_clickbait_proba(X)
        rows = [
            PredictionRow(a.id, g, label_from_clickbait_proba(p), float(p))
            for a, g, p in zip(corpus, golds, probs)
        ]
    elif family == "bilstm":
        probs = BiLstmBundle.load(model_dir).predict_clickbait_proba(corpus.articles)
        rows = [
            PredictionRow(a.id, g, label_from_clickbait_proba(p), float(p))
            for a, g, p in zip(corpus, golds, probs)
        ]
    elif family == "encoder-head":
        probs = EncoderHeadBundle.load(model_dir).predict_clickbait_proba(corpus.articles)
        rows = [
            PredictionRow(a.id, g, label_from_clickbait_proba(p), float(p))
            for a, g, p in zip(corpus, golds, probs)
        ]
    elif family == "contrastive":
        bundle = SiameseBundle.load(model_dir)
        rows = []
        for art, g in zip(corpus, golds):
            label, score = contrastive_predict(bundle, art, bundle.config.threshold)
            rows.append(PredictionRow(art.id, g, label, score))
    else:
        raise ValueError(f"unknown model family {family!r}")
    return rows


def cmd_predict(args) -> int:
    model_dir = Path(args.model_dir)
    if not model_dir.exists():
        raise FileNotFoundError(f"model directory not found: {model_dir}")
    corpus = load_corpus(args.corpus)
    if len(corpus) == 0:
        raise ValueError(f"corpus {corpus.name!r} is empty; nothing to predict")
    rows = _predict_rows(model_dir, corpus)
    save_predictions(rows, args.out)
    cfg.write_snapshot(
        str(args.out) + ".config.ini",
        {"predict": {"model_dir": str(model_dir), "corpus": args.corpus}},
    )
    print(f"wrote {len(rows)} predictions to {args.out}")
    return 0


def cmd_eval(args) -> int:
    rows = load_predictions(args.preds)
    if any(r.gold is None for r in rows):
        raise ValueError("evaluation needs gold labels in the prediction file")
    golds = [r.gold for r in rows]
    preds = [r.pred for r in rows]
    scores = [r.score for r in rows]
    report = evaluate(preds, golds, scores)
    if args.compare:
        other = load_predictions(args.compare)
        if [r.id for r in other] != [r.id for r in rows]:
            raise ValueError("compared prediction files cover different articles")
        stat, p = mcnemar(preds, [r.pred for r in other], golds)
        report.mcnemar_vs[args.compare_name] = (stat, p)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_report(report, out_dir / "report.txt", out_dir / "report.json")
    if report.curve is not None:
        export_pr_curve(report.curve, out_dir / "pr_curve.tsv")
    cfg.write_snapshot(
        out_dir / "config.ini",
        {"eval": {"preds": args.preds, "compare": args.compare or ""}},
    )
    print(render_report(report), end="")
    return 0


def _parse_pred_entries(entries: list[str]) -> list[tuple[str, str]]:
    out = []
    for entry in entries:
        if "=" not in entry:
            raise ValueError(f"expected ID=FILE, got {entry!r}")
        model_id, path = entry.split("=", 1)
        out.append((model_id, path))
    return out


def _aligned_rows(entries: list[tuple[str, str]]) -> tuple[list[str], list[Label], dict[str, list[PredictionRow]]]:
    per_model: dict[str, list[PredictionRow]] = {}
    ids: list[str] | None = None
    golds: list[Label] | None = None
    for model_id, path in entries:
        rows = load_predictions(path)
        if any(r.gold is None for r in rows):
            raise ValueError(f"{path}: ensemble needs gold labels present")
        row_ids = [r.id for r in rows]
        row_golds = [r.gold for r in rows]
        if ids is None:
            ids, golds = row_ids, row_golds
        elif row_ids != ids or row_golds != golds:
            raise ValueError(f"{path}: prediction files are not aligned")
        per_model[model_id] = rows
    return ids, golds, per_model


def cmd_ensemble_fit(args) -> int:
    entries = _parse_pred_entries(args.preds)
    ids, golds, per_model = _aligned_rows(entries)
    model_ids = [model_id for model_id, _ in entries]
    config = fit_weights(
        model_ids,
        [[r.pred for r in per_model[m]] for m in model_ids],
        golds,
        threshold=args.threshold,
    )
    config.save(args.out)
    for model_id, weight in zip(config.model_ids, config.weights):
        print(f"weight {model_id}: {weight:.6f}")
    return 0


def cmd_ensemble_apply(args) -> int:
    config = EnsembleConfig.load(args.config)
    entries = dict(_parse_pred_entries(args.preds))
    missing = [m for m in config.model_ids if m not in entries]
    if missing:
        raise ValueError(f"missing prediction files for models: {missing}")
    ids, golds, per_model = _aligned_rows([(m, entries[m]) for m in config.model_ids])
    rows = []
    for i, (article_id, gold) in enumerate(zip(ids, golds)):
        scores = [per_model[m][i].score for m in config.model_ids]
        label, combined = ensemble_predict(scores, config)
        rows.append(PredictionRow(article_id, gold, label, combined))
    save_predictions(rows, args.out)
    cfg.write_snapshot(
        str(args.out) + ".config.ini",
        {"ensemble": {"config": args.config, "models": ",".join(config.model_ids)}},
    )
    print(f"wrote {len(rows)} ensemble predictions to {args.out}")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "split": cmd_split,
    "featurize": cmd_featurize,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
}


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "ensemble":
        handler = cmd_ensemble_fit if args.ensemble_command == "fit" else cmd_ensemble_apply
    else:
        handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CorpusFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CheckpointVersionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON input: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
