"""Command-line entry point: ``dualemo <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .classifier import load_model, save_model
from .dataset import deduplicate, load_dataset, random_split, save_dataset, temporal_split
from .features import CATEGORY_MODES, SENTIMENT_MODES, FeatureConfig
from .pipeline import (
    DEFAULTS, FEATURE_SETS, PipelineError, analyze_dataset, evaluate_on_records, extract_features,
    load_split, make_adapter, read_jsonl, resolve_resources, run_pipeline, train_on_records, write_json,
    write_jsonl,
)
from .resources import LANGUAGES, load_resources
from .synthetic import generate_corpus


def _ratios(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("ratios must look like a:b:c")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("ratios must be numbers") from None
    if any(v < 0 for v in values) or sum(values) <= 0:
        raise argparse.ArgumentTypeError("ratios must be nonnegative with a positive sum")
    return values


def _add_resources(p: argparse.ArgumentParser) -> None:
    p.add_argument("--resources", default="builtin", help="resource directory, or 'builtin' for the shipped fixture")
    p.add_argument("--lang", choices=LANGUAGES, default="en")


def _add_extract_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", type=int, default=2)
    p.add_argument("--comments-limit", type=int, default=100)
    p.add_argument("--category", choices=CATEGORY_MODES, default="lexicon_vote")
    p.add_argument("--sentiment-mode", choices=SENTIMENT_MODES, default="score")
    p.add_argument("--sentiment-dims", type=int, default=1)


def _add_train_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", choices=FEATURE_SETS, default="dual")
    p.add_argument("--class-weights", choices=("none", "inverse"), default="none")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--hidden", type=lambda s: [int(x) for x in s.split(",") if x], default=None,
                   help="comma-separated hidden widths (default 256,128,64,32)")
    p.add_argument("--seed", type=int, default=42)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualemo", description="Dual emotion features for fake news detection")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="write dual emotion feature records as JSON Lines")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    _add_resources(p)
    _add_extract_opts(p)

    p = sub.add_parser("analyze", help="chi-square test and heatmap CSVs")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--whitelist", default=None, help="comma-separated category labels to keep")
    _add_resources(p)
    p.add_argument("--category", choices=CATEGORY_MODES, default="lexicon_vote")
    p.add_argument("--comments-limit", type=int, default=100)

    p = sub.add_parser("split", help="train/validation/test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("random", "temporal"), default="random")
    p.add_argument("--ratios", type=_ratios, default=(3.0, 1.0, 1.0))
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("dedup", help="drop near-duplicate pieces")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="deduplicated dataset path")
    p.add_argument("--report", default=None, help="cluster report path (default <out>.report.json)")
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--label-filter", default="fake", help="label to deduplicate, or 'all'")

    p = sub.add_parser("train", help="train the MLP on extracted features")
    p.add_argument("--feature-file", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--out", required=True, help="model path")
    p.add_argument("--history", default=None)
    _add_train_opts(p)

    p = sub.add_parser("eval", help="score a model on the test split")
    p.add_argument("--model", required=True)
    p.add_argument("--feature-file", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--features", choices=FEATURE_SETS, default="dual")
    p.add_argument("--out", default=None, help="metrics JSON path (default: stdout)")

    p = sub.add_parser("baseline", help="train and score on a baseline feature set")
    p.add_argument("--feature-file", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--out", default=None)
    _add_train_opts(p)
    p.set_defaults(features="emoratio")

    p = sub.add_parser("pipeline", help="run configured stages end to end")
    p.add_argument("--config", required=True)
    p.add_argument("--features", choices=FEATURE_SETS, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="override the output directory")

    p = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--lang", choices=LANGUAGES, default="en")
    return parser


def _train_cfg(args) -> dict:
    cfg = dict(DEFAULTS["train"])
    cfg.update({"epochs": args.epochs, "lr": args.lr, "batch_size": args.batch_size,
                "class_weights": args.class_weights, "patience": args.patience})
    if args.hidden is not None:
        cfg["hidden"] = args.hidden
    return cfg


def _emit(obj, out) -> None:
    if out:
        write_json(obj, Path(out))
    else:
        print(json.dumps(obj, indent=2, sort_keys=True))


def run(args) -> int:
    cmd = args.command
    if cmd in ("extract", "analyze"):
        bundle = load_resources(resolve_resources(args.resources, args.lang), args.lang)
        adapter = make_adapter(bundle, args.category)
        dataset = load_dataset(args.dataset)
        if cmd == "extract":
            config = FeatureConfig(args.window, args.comments_limit, args.sentiment_mode, args.sentiment_dims)
            write_jsonl(extract_features(dataset, bundle, adapter, config), Path(args.out))
        else:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            whitelist = args.whitelist.split(",") if args.whitelist else None
            for path in analyze_dataset(dataset, bundle, adapter, out, whitelist, args.comments_limit):
                print(path)
    elif cmd == "split":
        dataset = load_dataset(args.dataset)
        split = temporal_split(dataset) if args.mode == "temporal" else random_split(dataset, args.ratios, args.seed)
        write_json(split.to_dict(), Path(args.out))
        print("train={} validation={} test={}".format(*split.sizes))
    elif cmd == "dedup":
        label = None if args.label_filter == "all" else args.label_filter
        kept, report = deduplicate(load_dataset(args.dataset), label, args.threshold)
        save_dataset(kept, args.out)
        write_json(report.to_dict(), Path(args.report or f"{args.out}.report.json"))
        print(f"removed={report.removed} retained={report.retained}")
    elif cmd in ("train", "baseline"):
        records = read_jsonl(Path(args.feature_file))
        split = load_split(Path(args.split))
        model, history = train_on_records(records, split, args.features, _train_cfg(args), args.seed)
        if cmd == "train":
            save_model(model, args.out)
            if args.history:
                write_json(history.to_dict(), Path(args.history))
        else:
            _emit(evaluate_on_records(model, records, split.test, args.features), args.out)
    elif cmd == "eval":
        model = load_model(args.model)
        records = read_jsonl(Path(args.feature_file))
        _emit(evaluate_on_records(model, records, load_split(Path(args.split)).test, args.features), args.out)
    elif cmd == "pipeline":
        overrides: dict = {}
        if args.features:
            overrides["features"] = {"set": args.features}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out:
            overrides["out"] = str(Path(args.out).resolve())
        result = run_pipeline(args.config, overrides)
        if result.metrics is not None:
            print(f"macro_f1={result.metrics['macro_f1']:.4f} accuracy={result.metrics['accuracy']:.4f}")
        print(result.manifest)
    elif cmd == "synth":
        save_dataset(generate_corpus(args.n, args.seed, args.lang), args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return run(args)
    except (PipelineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
