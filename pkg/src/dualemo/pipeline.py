"""Stage functions shared by the CLI and the ``pipeline`` runner.

Stages run in the order dedup, split, extract, train, eval, analyze. The
runner reads a YAML config; relative paths resolve against the config file.
"""

from __future__ import annotations

import copy
import hashlib
import json
import logging
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from . import __version__
from .analysis import (
    DegenerateTableError, categorize, category_grid, chi_square, contingency_table, heatmap_rows,
)
from .classifier import TrainConfig, build_mlp, load_model, predict_proba, save_model, train
from .dataset import LABELS, Dataset, DatasetSplit, deduplicate, load_dataset, random_split, save_dataset, temporal_split
from .features import ClassifierAdapter, FeatureConfig, feature_record
from .metrics import metrics
from .resources import ResourceBundle, fixture_dir, load_resources

logger = logging.getLogger(__name__)

STAGES = ("dedup", "split", "extract", "train", "eval", "analyze")
FEATURE_SETS = ("dual", "publisher", "social", "gap", "emoratio", "emocred")

DEFAULTS: dict[str, Any] = {
    "language": "en",
    "seed": 42,
    "stages": list(STAGES),
    "dedup": {"label_filter": "fake", "threshold": 0.8},
    "split": {"mode": "random", "ratios": [3, 1, 1]},
    "features": {"window": 2, "comments_limit": 100, "category": "lexicon_vote",
                 "sentiment_mode": "score", "sentiment_dims": 1, "set": "dual"},
    "train": {"hidden": [256, 128, 64, 32], "epochs": 100, "lr": 0.05, "batch_size": 32,
              "class_weights": "none", "patience": 10, "embedding": "auto"},
    "analyze": {"whitelist": None},
}


class PipelineError(RuntimeError):
    pass


# -- helpers used by several CLI subcommands ----------------------------------

def resolve_resources(source: str | Path | None, language: str) -> Path:
    """``None`` or ``builtin`` selects the shipped fixture for ``language``."""
    if source is None or str(source) == "builtin":
        return fixture_dir(language)
    return Path(source)


def make_adapter(bundle: ResourceBundle, mode: str = "lexicon_vote") -> ClassifierAdapter:
    if mode == "lexicon_vote":
        return ClassifierAdapter.lexicon_vote(bundle)
    if mode == "precomputed":
        if not bundle.categories:
            raise ValueError("precomputed categories need categories.txt in the resource directory")
        return ClassifierAdapter.precomputed(bundle.categories)
    raise ValueError(f"unknown category mode {mode!r}")


def write_jsonl(records, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def read_jsonl(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def write_json(obj, path: Path) -> None:
    Path(path).write_text(json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def extract_features(dataset: Dataset, bundle: ResourceBundle, adapter: ClassifierAdapter,
                     config: FeatureConfig) -> list[dict]:
    return [feature_record(p, bundle, adapter, config) for p in dataset]


def select_features(record: Mapping, name: str) -> list[float]:
    """Pick one feature family out of a stored feature record."""
    if name not in FEATURE_SETS:
        raise ValueError(f"feature set must be one of {FEATURE_SETS}")
    if name == "emoratio":
        return [record["baselines"]["emoratio"]]
    if name == "emocred":
        return list(record["baselines"]["emocred"])
    dual = record["dual"]
    d = record["segments"]["publisher"]
    if name == "dual":
        return list(dual)
    if name == "publisher":
        return dual[:d]
    if name == "social":
        return dual[d:3 * d]
    return dual[3 * d:5 * d]


def class_names(records) -> list[str]:
    present = {r["label"] for r in records if r.get("label")}
    return [c for c in LABELS if c in present]


def matrix(records, ids, feature_set: str, classes: list[str], use_embedding: bool):
    by_id = {r["id"]: r for r in records}
    rows = [by_id[i] for i in ids if i in by_id and by_id[i].get("label") in classes]
    x = np.array([select_features(r, feature_set) for r in rows], dtype=float).reshape(len(rows), -1)
    y = np.array([classes.index(r["label"]) for r in rows], dtype=int)
    emb = np.array([r["detector_embedding"] for r in rows], dtype=float) if use_embedding and rows else None
    return x, y, emb, [r["id"] for r in rows]


def wants_embedding(records, setting) -> bool:
    if setting == "auto":
        return bool(records) and all("detector_embedding" in r for r in records)
    return bool(setting)


def train_on_records(records, split: DatasetSplit, feature_set: str, train_cfg: Mapping, seed: int):
    classes = class_names(records)
    if len(classes) < 2:
        raise ValueError("training needs at least two labeled classes")
    use_emb = wants_embedding(records, train_cfg.get("embedding", "auto"))
    x_tr, y_tr, e_tr, _ = matrix(records, split.train, feature_set, classes, use_emb)
    x_va, y_va, e_va, _ = matrix(records, split.validation, feature_set, classes, use_emb)
    if len(y_tr) == 0:
        raise ValueError("no labeled pieces in the training split")
    model = build_mlp(x_tr.shape[1], train_cfg.get("hidden"), classes, seed,
                      e_tr.shape[1] if e_tr is not None else 0)
    config = TrainConfig(
        epochs=int(train_cfg["epochs"]), learning_rate=float(train_cfg["lr"]),
        batch_size=int(train_cfg["batch_size"]), class_weights=str(train_cfg["class_weights"]),
        patience=int(train_cfg["patience"]), seed=seed,
    )
    val = (x_va, y_va, e_va) if len(y_va) else None
    return train(model, (x_tr, y_tr, e_tr), val, config)


def evaluate_on_records(model, records, ids, feature_set: str) -> dict:
    classes = model.classes
    x, y, emb, kept = matrix(records, ids, feature_set, classes, model.feature_spec.embedding_dim > 0)
    if len(y) == 0:
        raise ValueError("no labeled pieces to evaluate")
    probs = predict_proba(model, x, emb)
    pred = probs.argmax(axis=1)
    preds = [(classes[k], float(probs[i, k])) for i, k in enumerate(pred)]
    gold = [classes[k] for k in y]
    regime = "three_class" if "unverified" in classes else "two_class"
    result = metrics(preds, gold, regime).to_dict()
    result.update({"regime": regime, "features": feature_set, "n": len(y)})
    return result


def analyze_dataset(dataset: Dataset, bundle: ResourceBundle, adapter: ClassifierAdapter, out_dir: Path,
                    whitelist=None, comments_limit: int | None = None) -> list[Path]:
    cats = categorize(dataset, adapter, bundle, comments_limit)
    written = []
    try:
        table = contingency_table(dataset, adapter, bundle, None, cats)
        result = chi_square(table).to_dict()
        result["table"] = table.to_dict()
    except DegenerateTableError as exc:
        result = {"error": str(exc)}
    path = out_dir / "chisq.json"
    write_json(result, path)
    written.append(path)
    for veracity in ("fake", "real"):
        if not any(p.label == veracity for p in dataset):
            continue
        grid = category_grid(dataset, cats, adapter.labels, veracity, whitelist)
        path = out_dir / f"heatmap_{veracity}.csv"
        path.write_text(heatmap_rows(grid).to_csv(), encoding="utf-8")
        written.append(path)
    return written


# -- runner ------------------------------------------------------------------

def _merge(base: dict, override: Mapping) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path: str | Path, overrides: Mapping | None = None) -> dict:
    path = Path(path)
    raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if not isinstance(raw, dict):
        raise PipelineError(f"{path}: config must be a mapping")
    cfg = _merge(DEFAULTS, raw)
    cfg = _merge(cfg, overrides or {})
    base = path.parent
    for key in ("dataset", "out"):
        if cfg.get(key) is None:
            raise PipelineError(f"{path}: missing '{key}'")
        cfg[key] = str((base / cfg[key]).resolve()) if not Path(cfg[key]).is_absolute() else cfg[key]
    res = cfg.get("resources")
    if res is not None and str(res) != "builtin" and not Path(res).is_absolute():
        cfg["resources"] = str((base / res).resolve())
    return cfg


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class PipelineResult:
    out_dir: Path
    outputs: dict[str, list[Path]] = field(default_factory=dict)
    metrics: dict | None = None
    manifest: Path | None = None


def _validate(cfg: dict) -> None:
    unknown = [s for s in cfg["stages"] if s not in STAGES]
    if unknown:
        raise PipelineError(f"unknown stages {unknown}")
    if not Path(cfg["dataset"]).is_file():
        raise PipelineError(f"dataset not found: {cfg['dataset']}")
    res = resolve_resources(cfg.get("resources"), cfg["language"])
    if not res.is_dir():
        raise PipelineError(f"resources not found: {res}")
    if cfg["features"]["set"] not in FEATURE_SETS:
        raise PipelineError(f"features.set must be one of {FEATURE_SETS}")
    if cfg["split"]["mode"] not in ("random", "temporal"):
        raise PipelineError("split.mode must be random or temporal")


def run_pipeline(config: str | Path | dict, overrides: Mapping | None = None) -> PipelineResult:
    """Run the configured stages and write a reproducibility manifest.

    All checks on paths happen before any stage runs. If a stage fails,
    every file written by this run is removed and :class:`PipelineError`
    names the stage.
    """
    cfg = load_config(config, overrides) if not isinstance(config, dict) else _merge(DEFAULTS, config)
    _validate(cfg)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    seed = int(cfg["seed"])
    stages = [s for s in STAGES if s in cfg["stages"]]
    result = PipelineResult(out)
    written: list[Path] = []

    res_dir = resolve_resources(cfg.get("resources"), cfg["language"])
    bundle = load_resources(res_dir, cfg["language"])
    fcfg = cfg["features"]
    adapter = make_adapter(bundle, fcfg["category"])
    feature_config = FeatureConfig(int(fcfg["window"]), int(fcfg["comments_limit"]),
                                   fcfg["sentiment_mode"], int(fcfg["sentiment_dims"]))
    feature_set = fcfg["set"]

    state: dict[str, Any] = {"dataset": load_dataset(cfg["dataset"])}

    def emit(stage: str, path: Path) -> None:
        written.append(path)
        result.outputs.setdefault(stage, []).append(path)

    def run_stage(name: str) -> None:
        ds: Dataset = state["dataset"]
        if name == "dedup":
            kept, report = deduplicate(ds, cfg["dedup"]["label_filter"], float(cfg["dedup"]["threshold"]))
            state["dataset"] = kept
            path = out / "dedup_report.json"
            write_json(report.to_dict(), path)
            emit(name, path)
        elif name == "split":
            if cfg["split"]["mode"] == "temporal":
                split = temporal_split(ds)
            else:
                split = random_split(ds, cfg["split"]["ratios"], seed)
            state["split"] = split
            path = out / "split.json"
            write_json(split.to_dict(), path)
            emit(name, path)
        elif name == "extract":
            state["records"] = extract_features(ds, bundle, adapter, feature_config)
            path = out / "features.jsonl"
            write_jsonl(state["records"], path)
            emit(name, path)
        elif name == "train":
            records, split = _need(state, "records", "split")
            model, history = train_on_records(records, split, feature_set, cfg["train"], seed)
            state["model"] = model
            path = out / "model.json"
            save_model(model, path)
            emit(name, path)
            path = out / "history.json"
            write_json(history.to_dict(), path)
            emit(name, path)
        elif name == "eval":
            records, split, model = _need(state, "records", "split", "model")
            result.metrics = evaluate_on_records(model, records, split.test, feature_set)
            path = out / "metrics.json"
            write_json(result.metrics, path)
            emit(name, path)
        elif name == "analyze":
            for path in analyze_dataset(ds, bundle, adapter, out, cfg["analyze"].get("whitelist"),
                                        feature_config.comments_limit):
                emit(name, path)

    for name in stages:
        logger.info("stage %s", name)
        try:
            run_stage(name)
        except Exception as exc:
            for path in written:
                path.unlink(missing_ok=True)
            raise PipelineError(f"stage '{name}' failed: {exc}") from exc

    inputs = {"dataset": _sha256(Path(cfg["dataset"]))}
    for f in sorted(res_dir.iterdir()):
        if f.is_file():
            inputs[f"resources/{f.name}"] = _sha256(f)
    manifest = {
        "config": {k: v for k, v in cfg.items() if k not in ("dataset", "out", "resources")},
        "inputs": inputs,
        "seed": seed,
        "stages": stages,
        "versions": {"dualemo": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "outputs": {str(p.relative_to(out)): _sha256(p) for p in written},
    }
    result.manifest = out / "manifest.json"
    write_json(manifest, result.manifest)
    return result


def _need(state: dict, *keys: str):
    missing = [k for k in keys if k not in state]
    if missing:
        raise PipelineError(f"requires earlier stage output: {', '.join(missing)}")
    return tuple(state[k] for k in keys)


def load_split(path: Path) -> DatasetSplit:
    return DatasetSplit.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


__all__ = [
    "DEFAULTS", "FEATURE_SETS", "STAGES", "PipelineError", "PipelineResult", "analyze_dataset",
    "evaluate_on_records", "extract_features", "load_config", "load_model", "load_split", "make_adapter",
    "read_jsonl", "resolve_resources", "run_pipeline", "save_dataset", "select_features", "train_on_records",
    "write_json", "write_jsonl",
]
